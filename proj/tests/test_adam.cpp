#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "ppolab/adam.hpp"

using namespace ppolab;

namespace {
AdamConfig base_config() {
  AdamConfig c;
  c.lr = 1e-3;
  c.max_grad_norm = 0.5;
  return c;
}
}  // namespace

TEST_CASE("first step moves each coordinate by at most the learning rate") {
  AdamConfig cfg = base_config();
  cfg.max_grad_norm = 1e9;  // keep clipping out of the way
  AdamState st(cfg, 3);
  Eigen::VectorXd p(3), g(3);
  p << 1.0, -2.0, 0.5;
  g << 0.3, -40.0, 1e-3;
  const Eigen::VectorXd before = p;
  REQUIRE(adam_step(p, g, st));
  for (int i = 0; i < 3; ++i) {
    const double delta = p[i] - before[i];
    CHECK(std::abs(delta) <= cfg.lr * (1 + 1e-9));
    // first bias-corrected step is -lr * g / (|g| + eps), i.e. signed descent
    CHECK(delta * g[i] <= 0.0);
  }
  CHECK(st.step_count() == 1);
}

TEST_CASE("first step matches the closed form") {
  AdamConfig cfg = base_config();
  cfg.max_grad_norm = 1e9;
  AdamState st(cfg, 2);
  Eigen::VectorXd p(2), g(2);
  p << 0.0, 1.0;
  g << 0.2, -0.4;
  adam_step(p, g, st);
  for (int i = 0; i < 2; ++i) {
    const double want = (i == 0 ? 0.0 : 1.0) - cfg.lr * g[i] / (std::abs(g[i]) + cfg.eps);
    CHECK(p[i] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("large gradients are rescaled to the norm cap") {
  AdamConfig cfg = base_config();
  AdamState a(cfg, 2), b(cfg, 2);
  Eigen::VectorXd p1(2), p2(2), g(2), gscaled(2);
  p1 << 1.0, 1.0;
  p2 << 1.0, 1.0;
  g << 30.0, -40.0;  // norm 50, cap 0.5
  gscaled = g * (0.5 / 50.0);
  adam_step(p1, g, a);
  adam_step(p2, gscaled, b);
  CHECK(p1[0] == p2[0]);
  CHECK(p1[1] == p2[1]);
  CHECK(a.m1()[0] == b.m1()[0]);
}

TEST_CASE("gradients under the cap pass through unscaled") {
  AdamConfig cfg = base_config();
  AdamState st(cfg, 1);
  Eigen::VectorXd p(1), g(1);
  p << 0.0;
  g << 0.4;
  adam_step(p, g, st);
  CHECK(st.m1()[0] == doctest::Approx(0.1 * 0.4).epsilon(1e-12));
}

TEST_CASE("non-finite gradients reject the step and leave state untouched") {
  AdamState st(base_config(), 2);
  Eigen::VectorXd p(2), g(2);
  p << 1.0, 2.0;
  g << 0.1, std::numeric_limits<double>::quiet_NaN();
  CHECK(!adam_step(p, g, st));
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 2.0);
  CHECK(st.step_count() == 0);
  CHECK(st.m1().norm() == 0.0);
  g[1] = std::numeric_limits<double>::infinity();
  CHECK(!adam_step(p, g, st));
  CHECK(st.step_count() == 0);
}

TEST_CASE("steps are pure given the state") {
  AdamConfig cfg = base_config();
  AdamState s1(cfg, 2);
  Eigen::VectorXd p1(2), g(2);
  p1 << 0.3, -0.6;
  g << 0.05, 0.02;
  AdamState s2 = s1;
  Eigen::VectorXd p2 = p1;
  adam_step(p1, g, s1);
  adam_step(p2, g, s2);
  CHECK(p1[0] == p2[0]);
  CHECK(p1[1] == p2[1]);
  CHECK(s1.m1()[0] == s2.m1()[0]);
  CHECK(s1.m2()[1] == s2.m2()[1]);
}

TEST_CASE("zero gradient leaves parameters fixed from a cold start") {
  AdamState st(base_config(), 2);
  Eigen::VectorXd p(2), g = Eigen::VectorXd::Zero(2);
  p << 5.0, -3.0;
  adam_step(p, g, st);
  CHECK(p[0] == 5.0);
  CHECK(p[1] == -3.0);
  CHECK(st.step_count() == 1);
}

TEST_CASE("linear annealing hits zero after the scheduled horizon") {
  AdamConfig cfg = base_config();
  cfg.schedule = LrSchedule::linear_to_zero;
  cfg.total_steps = 10;
  AdamState st(cfg, 1);
  CHECK(st.effective_lr() == cfg.lr);
  Eigen::VectorXd p(1), g(1);
  p << 1.0;
  g << 0.1;
  for (int t = 0; t < 10; ++t) {
    CHECK(st.effective_lr() == doctest::Approx(cfg.lr * (1.0 - t / 10.0)).epsilon(1e-12));
    adam_step(p, g, st);
  }
  CHECK(st.effective_lr() == 0.0);
  // an extra step at lr 0 cannot move parameters
  const double frozen = p[0];
  adam_step(p, g, st);
  CHECK(p[0] == frozen);
  CHECK(st.effective_lr() == 0.0);
}

TEST_CASE("constant schedule ignores the step count") {
  AdamConfig cfg = base_config();
  AdamState st(cfg, 1);
  Eigen::VectorXd p(1), g(1);
  p << 0.0;
  g << 1.0;
  for (int t = 0; t < 5; ++t) adam_step(p, g, st);
  CHECK(st.effective_lr() == cfg.lr);
}
