#pragma once

#include <Eigen/Core>

#include "ppolab/rollout.hpp"

namespace ppolab {

struct AdvantageEstimate {
  Eigen::VectorXd advantages;
  Eigen::VectorXd value_targets;  // advantages + values, the critic regression target
};

// Generalized advantage estimation over the batch, per env column, backwards
// in time:
//   delta_t = r_t + gamma * (1 - terminated_t) * V(s_{t+1}) - V(s_t)
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// Termination zeroes the bootstrap; truncation keeps it (the stored
// next_values hold the pre-reset state's value) but still cuts the recursion.
AdvantageEstimate compute_gae(const TransitionBatch& batch, double gamma, double lambda);

// In-place shift to zero mean and unit variance over the whole batch, with the
// population std floored at 1e-8. A constant batch maps to all zeros, and the
// map is idempotent to machine precision.
void normalize_advantages(Eigen::VectorXd& advantages);

}  // namespace ppolab
