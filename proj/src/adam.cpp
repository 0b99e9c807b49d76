#include "ppolab/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ppolab {

double AdamState::effective_lr() const {
  if (cfg_.schedule == LrSchedule::constant) return cfg_.lr;
  if (cfg_.total_steps == 0) return cfg_.lr;
  const double frac =
      1.0 - static_cast<double>(step_) / static_cast<double>(cfg_.total_steps);
  return cfg_.lr * std::max(0.0, frac);
}

bool adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad,
               AdamState& state) {
  if (params.size() != grad.size() || params.size() != state.m1_.size())
    throw std::invalid_argument("adam_step: size mismatch");
  if (!grad.allFinite()) return false;

  Eigen::VectorXd g = grad;
  const double norm = g.norm();
  if (norm > state.cfg_.max_grad_norm) g *= state.cfg_.max_grad_norm / norm;

  const double lr = state.effective_lr();
  const double b1 = state.cfg_.beta1;
  const double b2 = state.cfg_.beta2;
  state.m1_ = b1 * state.m1_ + (1.0 - b1) * g;
  state.m2_ = b2 * state.m2_.array() + (1.0 - b2) * g.array().square();
  const double t = static_cast<double>(state.step_ + 1);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  params.array() -=
      lr * (state.m1_.array() / c1) / ((state.m2_.array() / c2).sqrt() + state.cfg_.eps);
  state.step_ += 1;
  return true;
}

}  // namespace ppolab
