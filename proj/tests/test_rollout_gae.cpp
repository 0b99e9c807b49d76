#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "ppolab/gae.hpp"
#include "ppolab/rollout.hpp"

using namespace ppolab;

namespace {

// Explicit discounted-sum reference: expands the recursion into the literal
// sum A_t = sum_k (gamma*lambda)^(k-t) * delta_k, cut after the first done.
Eigen::VectorXd brute_force_gae(const TransitionBatch& b, double gamma, double lambda) {
  Eigen::VectorXd adv(b.rows());
  for (int n = 0; n < b.N; ++n) {
    for (int t = 0; t < b.T; ++t) {
      double a = 0.0, coef = 1.0;
      for (int k = t; k < b.T; ++k) {
        const int i = b.index(k, n);
        const double not_term = b.terminated[i] ? 0.0 : 1.0;
        const double delta =
            b.rewards[i] + gamma * not_term * b.next_values[i] - b.values[i];
        a += coef * delta;
        if (b.done(i)) break;
        coef *= gamma * lambda;
      }
      adv[b.index(t, n)] = a;
    }
  }
  return adv;
}

TransitionBatch synthetic_batch(Rng& rng, int max_T = 32) {
  TransitionBatch b;
  b.T = 1 + static_cast<int>(rng.below(max_T));
  b.N = 1 + static_cast<int>(rng.below(4));
  const int rows = b.T * b.N;
  b.rewards.resize(rows);
  b.rewards_raw.resize(rows);
  b.values.resize(rows);
  b.next_values.resize(rows);
  b.terminated.assign(rows, 0);
  b.truncated.assign(rows, 0);
  for (int i = 0; i < rows; ++i) {
    b.rewards_raw[i] = b.rewards[i] = rng.uniform(-1, 1);
    b.values[i] = rng.uniform(-1, 1);
    b.next_values[i] = rng.uniform(-1, 1);
    if (rng.next_double() < 0.15) {
      if (rng.next_double() < 0.5)
        b.terminated[i] = 1;
      else
        b.truncated[i] = 1;
    }
  }
  b.bootstrap_values.resize(b.N);
  for (int n = 0; n < b.N; ++n) b.bootstrap_values[n] = b.next_values[b.index(b.T - 1, n)];
  return b;
}

struct Harness {
  ActorCritic net;
  ParamVector params;
  std::vector<std::unique_ptr<Env>> envs;
  std::vector<Rng> action_rngs;
};

Harness make_harness(const std::string& env_id, int N, std::uint64_t seed,
                     std::vector<int> hidden = {16}) {
  Harness h;
  auto probe = make_env(env_id);
  PolicyHead head;
  if (probe->spec().action.discrete)
    head = {HeadKind::categorical, probe->spec().action.n};
  else
    head = {HeadKind::gaussian, probe->spec().action.dim};
  h.net = ActorCritic::make(probe->spec().obs_dim, head, hidden);
  Rng root(seed);
  Rng init_rng = root.fork(0);
  h.params = h.net.init_params(init_rng);
  for (int n = 0; n < N; ++n) {
    h.envs.push_back(make_env(env_id));
    h.envs.back()->reset(root.fork(100 + n).state());
    h.action_rngs.push_back(root.fork(200 + n));
  }
  return h;
}

void check_batches_equal(const TransitionBatch& a, const TransitionBatch& b) {
  REQUIRE(a.rows() == b.rows());
  CHECK(a.obs.cwiseEqual(b.obs).all());
  if (a.discrete)
    CHECK(a.actions_d.cwiseEqual(b.actions_d).all());
  else
    CHECK(a.actions_c.cwiseEqual(b.actions_c).all());
  CHECK(a.rewards.cwiseEqual(b.rewards).all());
  CHECK(a.values.cwiseEqual(b.values).all());
  CHECK(a.next_values.cwiseEqual(b.next_values).all());
  CHECK(a.behavior_log_probs.cwiseEqual(b.behavior_log_probs).all());
  CHECK(a.terminated == b.terminated);
  CHECK(a.truncated == b.truncated);
}

}  // namespace

TEST_CASE("gae matches the brute-force discounted sum") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    TransitionBatch b = synthetic_batch(rng);
    const double gamma = rng.uniform(0.9, 1.0);
    const double lambda = rng.next_double();
    const AdvantageEstimate est = compute_gae(b, gamma, lambda);
    const Eigen::VectorXd want = brute_force_gae(b, gamma, lambda);
    for (int i = 0; i < b.rows(); ++i) CHECK(std::abs(est.advantages[i] - want[i]) <= 1e-10);
  }
}

TEST_CASE("lambda zero reduces to one-step temporal differences") {
  Rng rng(72);
  TransitionBatch b = synthetic_batch(rng);
  const double gamma = 0.95;
  const AdvantageEstimate est = compute_gae(b, gamma, 0.0);
  for (int i = 0; i < b.rows(); ++i) {
    const double not_term = b.terminated[i] ? 0.0 : 1.0;
    const double delta = b.rewards[i] + gamma * not_term * b.next_values[i] - b.values[i];
    CHECK(est.advantages[i] == delta);
  }
}

TEST_CASE("gamma zero reduces to reward minus value") {
  Rng rng(73);
  TransitionBatch b = synthetic_batch(rng);
  const AdvantageEstimate est = compute_gae(b, 0.0, 0.7);
  for (int i = 0; i < b.rows(); ++i) CHECK(est.advantages[i] == b.rewards[i] - b.values[i]);
}

TEST_CASE("termination drops the bootstrap, truncation keeps it") {
  TransitionBatch b;
  b.T = 1;
  b.N = 2;
  b.rewards = Eigen::VectorXd::Constant(2, 1.0);
  b.rewards_raw = b.rewards;
  b.values = Eigen::VectorXd::Zero(2);
  b.next_values = Eigen::VectorXd::Constant(2, 10.0);
  b.terminated = {1, 0};
  b.truncated = {0, 1};
  b.bootstrap_values = b.next_values;
  const AdvantageEstimate est = compute_gae(b, 0.5, 0.9);
  CHECK(est.advantages[0] == 1.0);        // terminal: no bootstrap
  CHECK(est.advantages[1] == 1.0 + 5.0);  // truncated: bootstraps 0.5 * 10
}

TEST_CASE("value targets are advantages plus values") {
  Rng rng(74);
  TransitionBatch b = synthetic_batch(rng);
  const AdvantageEstimate est = compute_gae(b, 0.99, 0.95);
  for (int i = 0; i < b.rows(); ++i)
    CHECK(est.value_targets[i] == est.advantages[i] + b.values[i]);
}

TEST_CASE("advantage normalization is centered, scaled, and idempotent") {
  Rng rng(75);
  Eigen::VectorXd adv(257);
  for (int i = 0; i < adv.size(); ++i) adv[i] = rng.uniform(-5, 20);
  normalize_advantages(adv);
  CHECK(std::abs(adv.mean()) < 1e-12);
  const double std = std::sqrt(adv.squaredNorm() / adv.size());
  CHECK(std == doctest::Approx(1.0).epsilon(1e-9));

  Eigen::VectorXd again = adv;
  normalize_advantages(again);
  for (int i = 0; i < adv.size(); ++i) CHECK(std::abs(again[i] - adv[i]) <= 1e-12);
}

TEST_CASE("constant advantages normalize to zero without blowing up") {
  Eigen::VectorXd adv = Eigen::VectorXd::Constant(64, 3.25);
  normalize_advantages(adv);
  for (int i = 0; i < adv.size(); ++i) CHECK(adv[i] == 0.0);

  Eigen::VectorXd tiny = Eigen::VectorXd::Constant(64, 1.0);
  tiny[0] += 1e-300;  // degenerate spread still divides by the floor, not by 0
  normalize_advantages(tiny);
  CHECK(tiny.allFinite());
}

TEST_CASE("collected rows carry consistent policy and value quantities") {
  for (const std::string id : {"chain-mdp", "pendulum-continuous"}) {
    Harness h = make_harness(id, 2, 9001);
    TransitionBatch b = collect_rollout(h.net, h.params, h.envs, h.action_rngs, 12, 1.0);
    REQUIRE(b.rows() == 24);
    for (int i = 0; i < b.rows(); ++i) {
      const Eigen::VectorXd obs = b.obs.row(i).transpose();
      CHECK(b.values[i] == h.net.value(h.params, obs));
      Action a;
      if (b.discrete)
        a.discrete = b.actions_d[i];
      else
        a.box = b.actions_c.row(i).transpose();
      CHECK(b.behavior_log_probs[i] == h.net.log_prob(h.params, obs, a));
    }
  }
}

TEST_CASE("next values chain into the following row when no reset happened") {
  Harness h = make_harness("cartpole-discrete", 2, 44);
  TransitionBatch b = collect_rollout(h.net, h.params, h.envs, h.action_rngs, 20, 1.0);
  for (int t = 0; t < b.T - 1; ++t)
    for (int n = 0; n < b.N; ++n) {
      const int i = b.index(t, n);
      if (!b.done(i)) CHECK(b.next_values[i] == b.values[b.index(t + 1, n)]);
    }
  for (int n = 0; n < b.N; ++n)
    CHECK(b.bootstrap_values[n] == b.next_values[b.index(b.T - 1, n)]);
}

TEST_CASE("episode ends reset the env for the next row") {
  Harness h = make_harness("chain-mdp", 1, 321);
  TransitionBatch b = collect_rollout(h.net, h.params, h.envs, h.action_rngs, 60, 1.0);
  bool saw_reset = false;
  for (int t = 0; t < b.T - 1; ++t) {
    const int i = b.index(t, 0);
    if (b.done(i)) {
      CHECK(b.obs(b.index(t + 1, 0), 0) == 1.0);  // back at the left end
      saw_reset = true;
    }
  }
  CHECK(saw_reset);
}

TEST_CASE("vectorized collection interleaves independent per-env runs") {
  for (const std::string id : {"cartpole-discrete", "pendulum-continuous"}) {
    Harness multi = make_harness(id, 3, 555);
    TransitionBatch all = collect_rollout(multi.net, multi.params, multi.envs,
                                          multi.action_rngs, 16, 1.0);
    for (int n = 0; n < 3; ++n) {
      Harness single = make_harness(id, 3, 555);
      std::vector<std::unique_ptr<Env>> one;
      one.push_back(std::move(single.envs[n]));
      std::vector<Rng> one_rng{single.action_rngs[n]};
      TransitionBatch col = collect_rollout(single.net, single.params, one, one_rng, 16, 1.0);
      for (int t = 0; t < 16; ++t) {
        const int ia = all.index(t, n);
        const int ib = col.index(t, 0);
        CHECK(all.obs.row(ia).cwiseEqual(col.obs.row(ib)).all());
        CHECK(all.rewards[ia] == col.rewards[ib]);
        CHECK(all.values[ia] == col.values[ib]);
        CHECK(all.next_values[ia] == col.next_values[ib]);
        CHECK(all.behavior_log_probs[ia] == col.behavior_log_probs[ib]);
        CHECK(all.terminated[ia] == col.terminated[ib]);
        CHECK(all.truncated[ia] == col.truncated[ib]);
        if (all.discrete)
          CHECK(all.actions_d[ia] == col.actions_d[ib]);
        else
          CHECK(all.actions_c.row(ia).cwiseEqual(col.actions_c.row(ib)).all());
      }
    }
  }
}

TEST_CASE("two slices continue exactly where one long slice would be") {
  Harness twice = make_harness("cartpole-discrete", 2, 808);
  TransitionBatch first = collect_rollout(twice.net, twice.params, twice.envs,
                                          twice.action_rngs, 8, 1.0);
  TransitionBatch second = collect_rollout(twice.net, twice.params, twice.envs,
                                           twice.action_rngs, 8, 1.0);
  Harness once = make_harness("cartpole-discrete", 2, 808);
  TransitionBatch whole = collect_rollout(once.net, once.params, once.envs,
                                          once.action_rngs, 16, 1.0);
  for (int t = 0; t < 16; ++t)
    for (int n = 0; n < 2; ++n) {
      const TransitionBatch& part = t < 8 ? first : second;
      const int ip = part.index(t % 8, n);
      const int iw = whole.index(t, n);
      CHECK(whole.obs.row(iw).cwiseEqual(part.obs.row(ip)).all());
      CHECK(whole.rewards[iw] == part.rewards[ip]);
      CHECK(whole.actions_d[iw] == part.actions_d[ip]);
    }
}

TEST_CASE("collection is deterministic") {
  Harness a = make_harness("maze-grid", 2, 31415);
  Harness b = make_harness("maze-grid", 2, 31415);
  TransitionBatch ba = collect_rollout(a.net, a.params, a.envs, a.action_rngs, 25, 1.0);
  TransitionBatch bb = collect_rollout(b.net, b.params, b.envs, b.action_rngs, 25, 1.0);
  check_batches_equal(ba, bb);
}

TEST_CASE("reward scaling multiplies optimizer rewards only") {
  Harness a = make_harness("pendulum-continuous", 2, 2718);
  Harness b = make_harness("pendulum-continuous", 2, 2718);
  TransitionBatch one = collect_rollout(a.net, a.params, a.envs, a.action_rngs, 10, 1.0);
  TransitionBatch two = collect_rollout(b.net, b.params, b.envs, b.action_rngs, 10, 2.0);
  CHECK(one.rewards_raw.cwiseEqual(two.rewards_raw).all());
  CHECK(one.actions_c.cwiseEqual(two.actions_c).all());
  for (int i = 0; i < one.rows(); ++i) CHECK(two.rewards[i] == 2.0 * one.rewards[i]);

  // with a zeroed critic and lambda 1 the advantages scale linearly too
  one.values.setZero();
  one.next_values.setZero();
  two.values.setZero();
  two.next_values.setZero();
  const AdvantageEstimate ea = compute_gae(one, 0.99, 1.0);
  const AdvantageEstimate eb = compute_gae(two, 0.99, 1.0);
  for (int i = 0; i < one.rows(); ++i) CHECK(eb.advantages[i] == 2.0 * ea.advantages[i]);
}

TEST_CASE("episode tracker reports whole returns across slice boundaries") {
  Harness h = make_harness("chain-mdp", 1, 606);
  EpisodeTracker tracker(1);
  for (int s = 0; s < 12; ++s)
    collect_rollout(h.net, h.params, h.envs, h.action_rngs, 7, 1.0, &tracker);
  REQUIRE(!tracker.completed_returns.empty());
  for (std::size_t e = 0; e < tracker.completed_returns.size(); ++e) {
    CHECK(tracker.completed_returns[e] <= 1.0);
    CHECK(tracker.completed_returns[e] >= 0.0);
    CHECK(tracker.completed_lengths[e] <= 20);
  }
}
