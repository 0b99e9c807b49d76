#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ppolab/checkpoint.hpp"
#include "ppolab/config.hpp"
#include "ppolab/env.hpp"
#include "ppolab/inner_loop.hpp"
#include "ppolab/network.hpp"
#include "ppolab/rollout.hpp"

namespace ppolab {

// Outcome of one seeded training run.
struct RunResult {
  std::vector<EvalPoint> eval_points;
  std::vector<IterationDiag> diagnostics;
  std::vector<double> absolute_returns;  // raw episode returns of the best policy
  double absolute_mean = 0.0;
  double absolute_stderr = 0.0;
  double best_mean = 0.0;
  std::uint64_t best_eval_index = 0;
  ParamVector final_theta;
  ParamVector best_theta;
  std::uint64_t iterations_done = 0;
  std::uint64_t transitions_done = 0;
  bool completed = false;
  bool nan_aborted = false;
};

// Actor-critic wiring implied by a config: head from the env's action space,
// hidden sizes from the network block.
ActorCritic build_network(const RunConfig& cfg);

// Runs `episodes` full episodes sampling stochastically from the policy and
// returns the raw (unscaled) episode returns. All randomness derives from
// eval_seed alone, so evaluation never touches a training stream.
std::vector<double> evaluate_policy(const ActorCritic& net, const ParamVector& theta,
                                    const std::string& env_id, int episodes,
                                    std::uint64_t eval_seed);

// One seeded training run, advanced an outer iteration at a time. The
// complete state lives in a Checkpoint, so a run can be snapshotted at any
// iteration boundary and resumed elsewhere with bit-identical continuation.
class TrainingRun {
 public:
  explicit TrainingRun(const RunConfig& cfg);
  TrainingRun(const RunConfig& cfg, const Checkpoint& resume_from);

  // Runs any due intermediate evaluations, then one outer iteration.
  // Returns false once the budget is exhausted or the run aborted; callbacks
  // fire before the call returns.
  bool step();

  // Final due evaluations, absolute evaluation of the best policy, result
  // assembly. Skips the evaluations after a numerical abort.
  RunResult finish();

  bool aborted() const { return aborted_; }
  std::uint64_t transitions_done() const { return transitions_done_; }
  const ParamVector& theta() const { return theta_; }

  // Serializable snapshot at the current iteration boundary.
  Checkpoint snapshot() const;

  std::function<void(const IterationDiag&)> on_iteration;
  std::function<void(const EvalPoint&)> on_eval;

 private:
  void init_fresh();
  void restore(const Checkpoint& ck);
  void run_due_evals();
  void record_eval(double mean);

  RunConfig cfg_;
  ActorCritic net_;
  ParamVector theta_;
  OuterState outer_;
  AdamState adam_actor_;
  AdamState adam_critic_;
  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<Rng> action_rngs_;
  Rng inner_rng_{0};
  EpisodeTracker tracker_{0};

  std::uint64_t iterations_done_ = 0;
  std::uint64_t transitions_done_ = 0;
  std::uint64_t next_eval_ = 0;
  std::uint64_t total_iterations_ = 0;
  std::vector<EvalPoint> eval_points_;
  std::vector<IterationDiag> diagnostics_;
  double best_mean_ = 0.0;
  std::uint64_t best_eval_index_ = 0;
  ParamVector best_theta_;
  bool aborted_ = false;
};

// Convenience wrapper: construct, run to completion, assemble the result.
RunResult train(const RunConfig& cfg);

}  // namespace ppolab
