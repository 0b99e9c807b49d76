#pragma once

#include <cstdint>

#include "ppolab/adam.hpp"
#include "ppolab/losses.hpp"

namespace ppolab {

struct PpoConfig {
  int rollout_length = 128;  // T
  int num_envs = 8;          // N
  int num_epochs = 4;
  int num_minibatches = 4;   // power of two, divides T*N
  double clip_epsilon = 0.2;
  double value_clip_epsilon = 0.2;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double max_grad_norm = 0.5;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double reward_scale = 1.0;
  bool anneal_lr = true;
  bool normalize_advantages = true;  // per-minibatch standardization

  int batch_rows() const { return rollout_length * num_envs; }
  int minibatch_rows() const { return batch_rows() / num_minibatches; }
};

// Throws std::invalid_argument naming the offending field.
void validate(const PpoConfig& cfg);

struct InnerLoopResult {
  ParamVector theta_star;
  bool aborted = false;  // non-finite loss or gradient; theta_star holds the last good params
  // diagnostics averaged over the executed updates
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  double active_fraction = 0.0;
  double entropy = 0.0;
  int updates_run = 0;
};

// One epoch's worth of minibatch index sets: a single shuffle of 0..rows-1
// split into equal contiguous slices, so the slices partition the batch.
std::vector<std::vector<int>> epoch_minibatch_indices(Rng& rng, int rows, int num_minibatches);

// Runs num_epochs passes over the batch, each a fresh shuffle split into
// num_minibatches slices, stepping the actor and critic with their own Adam
// states. The caller's theta is copied, never mutated; the Adam states carry
// over so momentum persists across outer iterations.
InnerLoopResult inner_optimization_loop(const ActorCritic& net, const ParamVector& theta,
                                        const TransitionBatch& batch,
                                        const AdvantageEstimate& est, const PpoConfig& cfg,
                                        AdamState& adam_actor, AdamState& adam_critic,
                                        Rng& rng);

}  // namespace ppolab
