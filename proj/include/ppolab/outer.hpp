#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "ppolab/param_vector.hpp"

namespace ppolab {

// How the parameter movement produced by one inner optimization round is
// turned into the next set of behavior parameters.
enum class OuterStrategy { standard, outer_lr, nesterov, biased_init };

// Canonical names as used by configs and the command line:
// "standard", "lr", "nesterov", "biased".
const char* outer_strategy_name(OuterStrategy s);
OuterStrategy parse_outer_strategy(const std::string& name);

struct OuterConfig {
  OuterStrategy strategy = OuterStrategy::standard;
  double sigma = 1.0;  // outer learning rate (lr, nesterov)
  double mu = 0.0;     // momentum decay (nesterov, biased)
  double alpha = 0.0;  // initialization bias scale (biased)
};

// Enforces sigma > 0, mu in [0,1), alpha >= 0 for the strategies that read
// them. Throws std::invalid_argument naming the offending knob.
void validate(const OuterConfig& cfg);

// Asymptotic per-iteration step scale under a constant outer gradient:
// 1 for standard, sigma for lr, sigma/(1-mu) for nesterov (momentum series
// limit), 1+alpha for biased (the bias converges to alpha times the
// gradient). Diagnostic only.
double effective_learning_rate(const OuterConfig& cfg);

struct OuterState {
  OuterConfig cfg;
  ParamVector momentum;  // m, zero at the first iteration
  std::uint64_t iteration = 0;

  static OuterState make(const OuterConfig& cfg, std::shared_ptr<const ParamLayout> layout);
};

// The displacement one inner optimization produced: theta_star - theta.
ParamVector outer_gradient(const ParamVector& theta, const ParamVector& theta_star);

// The textbook update rules, pure in their inputs.
ParamVector apply_standard(const ParamVector& theta, const ParamVector& outer_grad);
ParamVector apply_outer_lr(const ParamVector& theta, const ParamVector& outer_grad,
                           double sigma);

// Two-line momentum update: m <- mu*m + g, result = theta + sigma*(m + mu*g).
// The refreshed m is stored back into state.
ParamVector apply_outer_nesterov(OuterState& state, const ParamVector& theta,
                                 const ParamVector& outer_grad);

// Start point for the inner loop: theta + alpha*m with the momentum carried
// over from the previous iteration. Runs after data collection, so the
// behavior log-probs in the batch still belong to theta. A no-op for every
// other strategy and at the first iteration (m = 0).
ParamVector biased_iteration_bias(const ParamVector& theta, const OuterState& state);

struct OuterStepResult {
  ParamVector theta_next;
  double outer_grad_norm = 0.0;
  // Norm of the extra displacement contributed by the momentum buffer on top
  // of a plain sigma-scaled step. Exactly zero whenever momentum cannot
  // influence the parameters, so reduced configurations (mu = 0, alpha = 0)
  // report the same diagnostics as the strategy they collapse to.
  double momentum_effect_norm = 0.0;
};

// Strategy dispatcher. Anchored on theta_star so that configurations which
// algebraically collapse onto a simpler strategy reproduce it bit for bit:
// the standard update returns theta_star itself, lr adds (sigma-1)*g to it,
// nesterov adds (sigma*(1+mu)-1)*g + sigma*mu*m, and biased returns
// theta_star while refreshing m <- mu*m + (1-mu)*g. Zero coefficients skip
// their term entirely, so sigma = 1, mu = 0 and alpha = 0 do not perturb a
// single bit. Advances state.iteration.
OuterStepResult outer_step(OuterState& state, const ParamVector& theta,
                           const ParamVector& theta_star);

}  // namespace ppolab
