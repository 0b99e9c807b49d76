#include "ppolab/inner_loop.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace ppolab {

namespace {
bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }
}  // namespace

void validate(const PpoConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("PpoConfig: " + msg); };
  if (cfg.rollout_length < 1) fail("rollout_length must be >= 1");
  if (cfg.num_envs < 1) fail("num_envs must be >= 1");
  if (cfg.num_epochs < 1) fail("num_epochs must be >= 1");
  if (!is_power_of_two(cfg.num_minibatches)) fail("num_minibatches must be a power of two");
  if (cfg.batch_rows() % cfg.num_minibatches != 0)
    fail("rollout_length * num_envs must be divisible by num_minibatches");
  if (cfg.clip_epsilon < 0.05 || cfg.clip_epsilon > 0.5)
    fail("clip_epsilon must lie in [0.05, 0.5]");
  if (cfg.value_clip_epsilon <= 0.0) fail("value_clip_epsilon must be positive");
  if (cfg.actor_lr <= 0.0 || cfg.critic_lr <= 0.0) fail("learning rates must be positive");
  if (cfg.max_grad_norm <= 0.0) fail("max_grad_norm must be positive");
  if (cfg.gamma < 0.9 || cfg.gamma > 1.0) fail("gamma must lie in [0.9, 1.0]");
  if (cfg.gae_lambda < 0.0 || cfg.gae_lambda > 1.0) fail("gae_lambda must lie in [0, 1]");
  if (cfg.reward_scale <= 0.0) fail("reward_scale must be positive");
}

std::vector<std::vector<int>> epoch_minibatch_indices(Rng& rng, int rows,
                                                      int num_minibatches) {
  std::vector<int> perm(rows);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  const int mb_rows = rows / num_minibatches;
  std::vector<std::vector<int>> slices(num_minibatches);
  for (int m = 0; m < num_minibatches; ++m)
    slices[m].assign(perm.begin() + static_cast<std::ptrdiff_t>(m) * mb_rows,
                     perm.begin() + static_cast<std::ptrdiff_t>(m + 1) * mb_rows);
  return slices;
}

InnerLoopResult inner_optimization_loop(const ActorCritic& net, const ParamVector& theta,
                                        const TransitionBatch& batch,
                                        const AdvantageEstimate& est, const PpoConfig& cfg,
                                        AdamState& adam_actor, AdamState& adam_critic,
                                        Rng& rng) {
  if (cfg.num_epochs < 1)
    throw std::invalid_argument("inner_optimization_loop: num_epochs must be >= 1");
  const int rows = batch.rows();
  if (rows != cfg.batch_rows())
    throw std::invalid_argument("inner_optimization_loop: batch does not match config");
  if (rows % cfg.num_minibatches != 0)
    throw std::invalid_argument("inner_optimization_loop: batch not divisible into minibatches");

  InnerLoopResult res;
  res.theta_star = theta;

  ParamVector grad_actor(theta.layout_ptr());
  ParamVector grad_critic(theta.layout_ptr());
  const auto asize = static_cast<Eigen::Index>(net.actor_size);
  const auto csize = static_cast<Eigen::Index>(net.critic_size);

  for (int epoch = 0; epoch < cfg.num_epochs; ++epoch) {
    const auto slices = epoch_minibatch_indices(rng, rows, cfg.num_minibatches);
    for (const std::vector<int>& idx : slices) {
      Minibatch mb = gather_minibatch(batch, est, idx);
      if (cfg.normalize_advantages) normalize_advantages(mb.advantages);

      grad_actor.data().setZero();
      grad_critic.data().setZero();
      const PolicyLossResult pl =
          clipped_policy_loss(net, res.theta_star, mb, cfg.clip_epsilon, &grad_actor);
      const ValueLossResult vl =
          clipped_value_loss(net, res.theta_star, mb, cfg.value_clip_epsilon, &grad_critic);
      // both gradients are vetted before either step so an abort never
      // leaves theta_star with one of the two slices updated
      if (!pl.finite || !vl.finite || !grad_actor.data().segment(0, asize).allFinite() ||
          !grad_critic.data().segment(asize, csize).allFinite()) {
        res.aborted = true;
        return res;
      }
      adam_step(res.theta_star.data().segment(0, asize),
                grad_actor.data().segment(0, asize), adam_actor);
      adam_step(res.theta_star.data().segment(asize, csize),
                grad_critic.data().segment(asize, csize), adam_critic);

      res.policy_loss += pl.loss;
      res.value_loss += vl.loss;
      res.clip_fraction += pl.clip_fraction;
      res.mean_ratio += pl.mean_ratio;
      res.active_fraction += pl.active_fraction;
      res.entropy += pl.entropy;
      res.updates_run += 1;
    }
  }

  if (res.updates_run > 0) {
    const double inv = 1.0 / res.updates_run;
    res.policy_loss *= inv;
    res.value_loss *= inv;
    res.clip_fraction *= inv;
    res.mean_ratio *= inv;
    res.active_fraction *= inv;
    res.entropy *= inv;
  }
  return res;
}

}  // namespace ppolab
