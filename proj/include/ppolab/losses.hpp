#pragma once

#include <Eigen/Core>
#include <vector>

#include "ppolab/gae.hpp"
#include "ppolab/network.hpp"
#include "ppolab/rollout.hpp"

namespace ppolab {

// Rows gathered out of a TransitionBatch for one optimization step.
// advantages are mutable so the per-minibatch normalization can run in place.
struct Minibatch {
  Eigen::MatrixXd obs;
  Eigen::VectorXi actions_d;
  Eigen::MatrixXd actions_c;
  bool discrete = true;
  Eigen::VectorXd behavior_log_probs;
  Eigen::VectorXd advantages;
  Eigen::VectorXd value_targets;
  Eigen::VectorXd old_values;  // collection-time V(s_t), anchors the value clip

  Eigen::Index rows() const { return obs.rows(); }
};

Minibatch gather_minibatch(const TransitionBatch& batch, const AdvantageEstimate& est,
                           const std::vector<int>& indices);

struct PolicyLossResult {
  double loss = 0.0;            // negative clipped surrogate, ready for descent
  double clip_fraction = 0.0;   // fraction of samples with |ratio - 1| > eps
  double mean_ratio = 0.0;
  double active_fraction = 0.0; // fraction of samples with a live gradient
  double entropy = 0.0;         // mean policy entropy, diagnostic only
  bool finite = true;
};

// loss = -mean_b min(ratio_b * A_b, clip(ratio_b, 1-eps, 1+eps) * A_b) with
// ratio_b = exp(log pi(a_b|s_b) - behavior_log_prob_b). When grad is given,
// d(loss)/d(actor params) is accumulated into its actor segments. Samples
// where the min selects a saturated clipped branch contribute zero gradient.
PolicyLossResult clipped_policy_loss(const ActorCritic& net, const ParamVector& params,
                                     const Minibatch& mb, double clip_epsilon,
                                     ParamVector* grad);

// Mirrors the clipped-surrogate case analysis: a sample has nonzero policy
// gradient exactly when the ratio sits inside the clip band or moving it
// toward 1 would raise the objective.
bool nonzero_gradient_indicator(double ratio, double advantage, double clip_epsilon);

struct ValueLossResult {
  double loss = 0.0;
  bool finite = true;
};

// loss = mean_b max((V_b - targ_b)^2, (clip(V_b, old_b - eps, old_b + eps) - targ_b)^2).
// The subgradient follows the achieving branch; a saturated clipped branch is
// constant in V and contributes nothing. Gradients accumulate into the critic
// segments of grad when given.
ValueLossResult clipped_value_loss(const ActorCritic& net, const ParamVector& params,
                                   const Minibatch& mb, double value_clip_epsilon,
                                   ParamVector* grad);

}  // namespace ppolab
