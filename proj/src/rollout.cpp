#include "ppolab/rollout.hpp"

#include <stdexcept>

namespace ppolab {

TransitionBatch collect_rollout(const ActorCritic& net, const ParamVector& params,
                                std::vector<std::unique_ptr<Env>>& envs,
                                std::vector<Rng>& action_rngs, int T, double reward_scale,
                                EpisodeTracker* tracker) {
  const int N = static_cast<int>(envs.size());
  if (N == 0 || T <= 0) throw std::invalid_argument("collect_rollout: empty rollout");
  if (action_rngs.size() != envs.size())
    throw std::invalid_argument("collect_rollout: one action stream per env required");
  const EnvSpec& spec = envs[0]->spec();

  TransitionBatch b;
  b.T = T;
  b.N = N;
  b.discrete = spec.action.discrete;
  const int rows = T * N;
  b.obs.resize(rows, spec.obs_dim);
  if (b.discrete)
    b.actions_d.resize(rows);
  else
    b.actions_c.resize(rows, spec.action.dim);
  b.rewards_raw.resize(rows);
  b.rewards.resize(rows);
  b.behavior_log_probs.resize(rows);
  b.values.resize(rows);
  b.next_values.resize(rows);
  b.bootstrap_values.resize(N);
  b.terminated.assign(rows, 0);
  b.truncated.assign(rows, 0);

  for (int t = 0; t < T; ++t) {
    for (int n = 0; n < N; ++n) {
      const int i = b.index(t, n);
      const Eigen::VectorXd obs = envs[n]->observation();
      b.obs.row(i) = obs.transpose();
      double logp = 0.0;
      const Action a = net.sample_action(params, obs, action_rngs[n], &logp);
      if (b.discrete)
        b.actions_d[i] = a.discrete;
      else
        b.actions_c.row(i) = a.box.transpose();
      b.behavior_log_probs[i] = logp;
      b.values[i] = net.value(params, obs);

      const StepResult r = envs[n]->step(a);
      b.rewards_raw[i] = r.reward;
      b.rewards[i] = reward_scale * r.reward;
      b.terminated[i] = r.terminated ? 1 : 0;
      b.truncated[i] = r.truncated ? 1 : 0;
      b.next_values[i] = net.value(params, r.obs);

      if (tracker) {
        tracker->running_return[n] += r.reward;
        tracker->running_length[n] += 1;
      }
      if (r.terminated || r.truncated) {
        if (tracker) {
          tracker->completed_returns.push_back(tracker->running_return[n]);
          tracker->completed_lengths.push_back(tracker->running_length[n]);
          tracker->running_return[n] = 0.0;
          tracker->running_length[n] = 0;
        }
        envs[n]->reset_continue();
      }
    }
  }
  for (int n = 0; n < N; ++n) b.bootstrap_values[n] = b.next_values[b.index(T - 1, n)];
  return b;
}

}  // namespace ppolab
