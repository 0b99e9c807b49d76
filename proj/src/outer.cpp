#include "ppolab/outer.hpp"

#include <cmath>
#include <stdexcept>

namespace ppolab {

const char* outer_strategy_name(OuterStrategy s) {
  switch (s) {
    case OuterStrategy::standard: return "standard";
    case OuterStrategy::outer_lr: return "lr";
    case OuterStrategy::nesterov: return "nesterov";
    case OuterStrategy::biased_init: return "biased";
  }
  throw std::logic_error("outer_strategy_name: unknown strategy");
}

OuterStrategy parse_outer_strategy(const std::string& name) {
  if (name == "standard") return OuterStrategy::standard;
  if (name == "lr") return OuterStrategy::outer_lr;
  if (name == "nesterov") return OuterStrategy::nesterov;
  if (name == "biased") return OuterStrategy::biased_init;
  throw std::invalid_argument("unknown outer strategy '" + name +
                              "' (expected standard, lr, nesterov or biased)");
}

void validate(const OuterConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("OuterConfig: " + msg); };
  const bool uses_sigma =
      cfg.strategy == OuterStrategy::outer_lr || cfg.strategy == OuterStrategy::nesterov;
  const bool uses_mu =
      cfg.strategy == OuterStrategy::nesterov || cfg.strategy == OuterStrategy::biased_init;
  if (uses_sigma && !(cfg.sigma > 0.0)) fail("sigma must be positive");
  if (uses_mu && !(cfg.mu >= 0.0 && cfg.mu < 1.0)) fail("mu must lie in [0, 1)");
  if (cfg.strategy == OuterStrategy::biased_init && !(cfg.alpha >= 0.0))
    fail("alpha must be non-negative");
}

double effective_learning_rate(const OuterConfig& cfg) {
  switch (cfg.strategy) {
    case OuterStrategy::standard: return 1.0;
    case OuterStrategy::outer_lr: return cfg.sigma;
    case OuterStrategy::nesterov: return cfg.sigma / (1.0 - cfg.mu);
    case OuterStrategy::biased_init: return 1.0 + cfg.alpha;
  }
  throw std::logic_error("effective_learning_rate: unknown strategy");
}

OuterState OuterState::make(const OuterConfig& cfg, std::shared_ptr<const ParamLayout> layout) {
  validate(cfg);
  OuterState st;
  st.cfg = cfg;
  st.momentum = ParamVector(std::move(layout));
  return st;
}

ParamVector outer_gradient(const ParamVector& theta, const ParamVector& theta_star) {
  return param_sub(theta_star, theta);
}

ParamVector apply_standard(const ParamVector& theta, const ParamVector& outer_grad) {
  ParamVector next = theta;
  param_axpy(1.0, outer_grad, next);
  return next;
}

ParamVector apply_outer_lr(const ParamVector& theta, const ParamVector& outer_grad,
                           double sigma) {
  ParamVector next = theta;
  param_axpy(sigma, outer_grad, next);
  return next;
}

ParamVector apply_outer_nesterov(OuterState& state, const ParamVector& theta,
                                 const ParamVector& outer_grad) {
  check_same_layout(state.momentum, outer_grad, "apply_outer_nesterov");
  param_scale(state.cfg.mu, state.momentum);
  param_axpy(1.0, outer_grad, state.momentum);
  ParamVector lookahead = state.momentum;
  param_axpy(state.cfg.mu, outer_grad, lookahead);
  ParamVector next = theta;
  param_axpy(state.cfg.sigma, lookahead, next);
  return next;
}

ParamVector biased_iteration_bias(const ParamVector& theta, const OuterState& state) {
  if (state.cfg.strategy != OuterStrategy::biased_init) return theta;
  ParamVector init = theta;
  param_axpy(state.cfg.alpha, state.momentum, init);
  return init;
}

OuterStepResult outer_step(OuterState& state, const ParamVector& theta,
                           const ParamVector& theta_star) {
  check_same_layout(theta, theta_star, "outer_step");
  check_same_layout(theta, state.momentum, "outer_step");
  const ParamVector g = outer_gradient(theta, theta_star);

  OuterStepResult res;
  res.outer_grad_norm = g.norm();
  res.theta_next = theta_star;

  const double sigma = state.cfg.sigma;
  const double mu = state.cfg.mu;
  switch (state.cfg.strategy) {
    case OuterStrategy::standard:
      break;
    case OuterStrategy::outer_lr:
      // theta + sigma*g written as theta_star + (sigma-1)*g
      param_axpy(sigma - 1.0, g, res.theta_next);
      break;
    case OuterStrategy::nesterov: {
      // theta + sigma*(m_k + mu*g) with m_k = mu*m + g, regrouped around
      // theta_star: theta_star + (sigma*(1+mu)-1)*g + sigma*mu*m
      if (mu != 0.0) {
        ParamVector eff = state.momentum;
        param_axpy(1.0, g, eff);
        res.momentum_effect_norm = sigma * mu * eff.norm();
      }
      param_axpy(sigma * (1.0 + mu) - 1.0, g, res.theta_next);
      param_axpy(sigma * mu, state.momentum, res.theta_next);
      param_scale(mu, state.momentum);
      param_axpy(1.0, g, state.momentum);
      break;
    }
    case OuterStrategy::biased_init:
      // the parameters keep the inner result; only the running average moves
      param_scale(mu, state.momentum);
      param_axpy(1.0 - mu, g, state.momentum);
      break;
  }
  state.iteration += 1;
  return res;
}

}  // namespace ppolab
