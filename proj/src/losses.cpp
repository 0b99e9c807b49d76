#include "ppolab/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace ppolab {

Minibatch gather_minibatch(const TransitionBatch& batch, const AdvantageEstimate& est,
                           const std::vector<int>& indices) {
  Minibatch mb;
  const Eigen::Index B = static_cast<Eigen::Index>(indices.size());
  mb.discrete = batch.discrete;
  mb.obs.resize(B, batch.obs.cols());
  if (batch.discrete)
    mb.actions_d.resize(B);
  else
    mb.actions_c.resize(B, batch.actions_c.cols());
  mb.behavior_log_probs.resize(B);
  mb.advantages.resize(B);
  mb.value_targets.resize(B);
  mb.old_values.resize(B);
  for (Eigen::Index b = 0; b < B; ++b) {
    const int i = indices[b];
    mb.obs.row(b) = batch.obs.row(i);
    if (batch.discrete)
      mb.actions_d[b] = batch.actions_d[i];
    else
      mb.actions_c.row(b) = batch.actions_c.row(i);
    mb.behavior_log_probs[b] = batch.behavior_log_probs[i];
    mb.advantages[b] = est.advantages[i];
    mb.value_targets[b] = est.value_targets[i];
    mb.old_values[b] = batch.values[i];
  }
  return mb;
}

bool nonzero_gradient_indicator(double ratio, double advantage, double clip_epsilon) {
  return std::abs(ratio - 1.0) <= clip_epsilon || (ratio - 1.0) * advantage <= 0.0;
}

PolicyLossResult clipped_policy_loss(const ActorCritic& net, const ParamVector& params,
                                     const Minibatch& mb, double clip_epsilon,
                                     ParamVector* grad) {
  const Eigen::Index B = mb.rows();
  if (B == 0) throw std::invalid_argument("clipped_policy_loss: empty minibatch");

  MlpTape tape;
  const Eigen::MatrixXd dist =
      mlp_forward_batch(net.actor, "actor.", params, mb.obs, grad ? &tape : nullptr);
  Eigen::VectorXd log_probs, entropy;
  if (mb.discrete) {
    categorical_log_prob_entropy_batch(dist, mb.actions_d, log_probs, entropy);
  } else {
    gaussian_log_prob_entropy_batch(dist, params.vector("actor.log_std"), mb.actions_c,
                                    log_probs, entropy);
  }

  const Eigen::ArrayXd ratio = (log_probs - mb.behavior_log_probs).array().exp();
  const Eigen::ArrayXd clipped = ratio.min(1.0 + clip_epsilon).max(1.0 - clip_epsilon);
  const Eigen::ArrayXd adv = mb.advantages.array();
  const Eigen::ArrayXd unclipped_term = ratio * adv;
  const Eigen::ArrayXd clipped_term = clipped * adv;
  // the unclipped branch wins ties so boundary samples keep their gradient
  const auto unclipped_wins = unclipped_term <= clipped_term;

  PolicyLossResult res;
  res.loss = -unclipped_term.min(clipped_term).mean();
  res.clip_fraction = ((ratio - 1.0).abs() > clip_epsilon).cast<double>().mean();
  res.mean_ratio = ratio.mean();
  res.entropy = entropy.mean();
  res.finite = std::isfinite(res.loss) && ratio.isFinite().all();
  double active = 0.0;
  for (Eigen::Index b = 0; b < B; ++b)
    if (nonzero_gradient_indicator(ratio[b], adv[b], clip_epsilon)) active += 1.0;
  res.active_fraction = active / static_cast<double>(B);

  if (grad && res.finite) {
    // d(loss)/d(log pi_b): the min passes gradient only to the unclipped
    // branch, where d/d(log pi) (ratio * A) = ratio * A.
    const Eigen::VectorXd coeff =
        unclipped_wins.select(-ratio * adv / static_cast<double>(B), 0.0).matrix();
    Eigen::MatrixXd d_dist;
    if (mb.discrete) {
      d_dist = categorical_log_prob_backward_batch(dist, mb.actions_d, coeff);
    } else {
      Eigen::VectorXd d_log_std;
      gaussian_log_prob_backward_batch(dist, params.vector("actor.log_std"), mb.actions_c,
                                       coeff, d_dist, d_log_std);
      grad->vector("actor.log_std") += d_log_std;
    }
    mlp_backward_batch(net.actor, "actor.", params, tape, d_dist, *grad);
  }
  return res;
}

ValueLossResult clipped_value_loss(const ActorCritic& net, const ParamVector& params,
                                   const Minibatch& mb, double value_clip_epsilon,
                                   ParamVector* grad) {
  const Eigen::Index B = mb.rows();
  if (B == 0) throw std::invalid_argument("clipped_value_loss: empty minibatch");
  if (mb.value_targets.size() != B || mb.old_values.size() != B)
    throw std::invalid_argument("clipped_value_loss: shape mismatch");

  MlpTape tape;
  const Eigen::VectorXd values =
      mlp_forward_batch(net.critic, "critic.", params, mb.obs, grad ? &tape : nullptr).col(0);
  const Eigen::ArrayXd err = values.array() - mb.value_targets.array();
  const Eigen::ArrayXd v_clipped =
      mb.old_values.array() +
      (values - mb.old_values).array().min(value_clip_epsilon).max(-value_clip_epsilon);
  const Eigen::ArrayXd err_clipped = v_clipped - mb.value_targets.array();
  const Eigen::ArrayXd sq = err.square();
  const Eigen::ArrayXd sq_clipped = err_clipped.square();

  ValueLossResult res;
  res.loss = sq.max(sq_clipped).mean();
  res.finite = std::isfinite(res.loss);

  if (grad && res.finite) {
    // max passes gradient to the achieving branch; when the clipped branch
    // wins, V sits outside the clip band and the branch is constant in V.
    const Eigen::MatrixXd d_values =
        (sq >= sq_clipped)
            .select(2.0 * err / static_cast<double>(B), 0.0)
            .matrix();
    mlp_backward_batch(net.critic, "critic.", params, tape, d_values, *grad);
  }
  return res;
}

}  // namespace ppolab
