#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "ppolab/env.hpp"
#include "ppolab/network.hpp"

namespace ppolab {

// Fixed-length slice of experience from N parallel environments. Rows are
// stored time-major: row index(t, n) = t*N + n. Episode ends inside the slice
// auto-reset; the flags mark where boundaries fell.
struct TransitionBatch {
  int T = 0;
  int N = 0;
  bool discrete = true;

  Eigen::MatrixXd obs;            // (T*N) x obs_dim
  Eigen::VectorXi actions_d;      // discrete actions
  Eigen::MatrixXd actions_c;      // continuous actions, (T*N) x act_dim
  Eigen::VectorXd rewards_raw;    // env rewards before scaling
  Eigen::VectorXd rewards;        // scaled rewards seen by the optimizer
  Eigen::VectorXd behavior_log_probs;
  Eigen::VectorXd values;         // V(s_t) under the collection parameters
  Eigen::VectorXd next_values;    // V(s_{t+1}); at episode ends the pre-reset state
  Eigen::VectorXd bootstrap_values;  // per env: next_values at the final row
  std::vector<std::uint8_t> terminated;
  std::vector<std::uint8_t> truncated;

  int index(int t, int n) const { return t * N + n; }
  int rows() const { return T * N; }
  bool done(int i) const { return terminated[i] || truncated[i]; }
};

// Per-env episode accumulators that survive across rollout slices, so episode
// returns spanning a slice boundary are reported once and whole.
struct EpisodeTracker {
  std::vector<double> running_return;
  std::vector<int> running_length;
  std::vector<double> completed_returns;  // raw returns of episodes that ended
  std::vector<int> completed_lengths;

  explicit EpisodeTracker(int num_envs = 0)
      : running_return(num_envs, 0.0), running_length(num_envs, 0) {}
};

// Steps every env T times under the sampled policy. Each env consumes only
// its own action stream and its own internal stream, so a vectorized
// collection is exactly the interleaving of the per-env sequential ones.
// Envs continue from their current state; the caller resets them up front.
TransitionBatch collect_rollout(const ActorCritic& net, const ParamVector& params,
                                std::vector<std::unique_ptr<Env>>& envs,
                                std::vector<Rng>& action_rngs, int T, double reward_scale,
                                EpisodeTracker* tracker = nullptr);

}  // namespace ppolab
