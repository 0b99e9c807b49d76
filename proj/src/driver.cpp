#include "ppolab/driver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppolab/gae.hpp"
#include "ppolab/outer.hpp"

namespace ppolab {

namespace {

// Stream keys hanging off the run seed. Environments use 2n, action sampling
// 2n+1, so the per-env streams stay disjoint for any env count; the named
// streams sit far above them. Evaluation hangs off its own subtree and never
// advances any training stream.
constexpr std::uint64_t kInitKey = 1ull << 32;
constexpr std::uint64_t kInnerKey = (1ull << 32) + 1;
constexpr std::uint64_t kEvalKey = 1ull << 33;
constexpr std::uint64_t kAbsoluteKey = (1ull << 33) + 1;

AdamConfig make_adam_config(double lr, const RunConfig& cfg, std::uint64_t total_iterations) {
  AdamConfig a;
  a.lr = lr;
  a.max_grad_norm = cfg.ppo.max_grad_norm;
  if (cfg.ppo.anneal_lr) {
    a.schedule = LrSchedule::linear_to_zero;
    a.total_steps = total_iterations * static_cast<std::uint64_t>(cfg.ppo.num_epochs) *
                    static_cast<std::uint64_t>(cfg.ppo.num_minibatches);
  }
  return a;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

ActorCritic build_network(const RunConfig& cfg) {
  const std::unique_ptr<Env> probe = make_env(cfg.env);
  const EnvSpec& spec = probe->spec();
  const PolicyHead head = spec.action.discrete
                              ? PolicyHead{HeadKind::categorical, spec.action.n}
                              : PolicyHead{HeadKind::gaussian, spec.action.dim};
  return ActorCritic::make(spec.obs_dim, head, cfg.network.hidden);
}

std::vector<double> evaluate_policy(const ActorCritic& net, const ParamVector& theta,
                                    const std::string& env_id, int episodes,
                                    std::uint64_t eval_seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
  const std::unique_ptr<Env> env = make_env(env_id);
  const Rng base(eval_seed);
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e) {
    const Rng episode = base.fork(static_cast<std::uint64_t>(e));
    Rng action_rng = episode.fork(1);
    Eigen::VectorXd obs = env->reset(episode.fork(0).state());
    double ep_return = 0.0;
    while (true) {
      const Action a = net.sample_action(theta, obs, action_rng, nullptr);
      const StepResult r = env->step(a);
      ep_return += r.reward;
      if (r.terminated || r.truncated) break;
      obs = r.obs;
    }
    returns.push_back(ep_return);
  }
  return returns;
}

TrainingRun::TrainingRun(const RunConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  net_ = build_network(cfg_);
  total_iterations_ =
      cfg_.total_transitions / (static_cast<std::uint64_t>(cfg_.ppo.rollout_length) *
                                static_cast<std::uint64_t>(cfg_.ppo.num_envs));
  init_fresh();
}

TrainingRun::TrainingRun(const RunConfig& cfg, const Checkpoint& resume_from) : cfg_(cfg) {
  validate(cfg_);
  net_ = build_network(cfg_);
  total_iterations_ =
      cfg_.total_transitions / (static_cast<std::uint64_t>(cfg_.ppo.rollout_length) *
                                static_cast<std::uint64_t>(cfg_.ppo.num_envs));
  restore(resume_from);
}

void TrainingRun::init_fresh() {
  const Rng root(cfg_.seed);
  Rng init_rng = root.fork(kInitKey);
  theta_ = net_.init_params(init_rng);
  outer_ = OuterState::make(cfg_.outer, theta_.layout_ptr());
  adam_actor_ = AdamState(make_adam_config(cfg_.ppo.actor_lr, cfg_, total_iterations_),
                          static_cast<Eigen::Index>(net_.actor_size));
  adam_critic_ = AdamState(make_adam_config(cfg_.ppo.critic_lr, cfg_, total_iterations_),
                           static_cast<Eigen::Index>(net_.critic_size));
  inner_rng_ = root.fork(kInnerKey);
  const int n = cfg_.ppo.num_envs;
  envs_.clear();
  action_rngs_.clear();
  for (int i = 0; i < n; ++i) {
    envs_.push_back(make_env(cfg_.env));
    envs_.back()->reset(root.fork(2 * static_cast<std::uint64_t>(i)).state());
    action_rngs_.push_back(root.fork(2 * static_cast<std::uint64_t>(i) + 1));
  }
  tracker_ = EpisodeTracker(n);
  best_theta_ = theta_;
  best_mean_ = -std::numeric_limits<double>::infinity();
}

void TrainingRun::restore(const Checkpoint& ck) {
  if (ck.env_id != cfg_.env)
    throw std::invalid_argument("resume: checkpoint env '" + ck.env_id +
                                "' does not match config env '" + cfg_.env + "'");
  const int n = cfg_.ppo.num_envs;
  if (static_cast<int>(ck.env_states.size()) != n ||
      static_cast<int>(ck.action_rng_states.size()) != n)
    throw std::invalid_argument("resume: checkpoint env count does not match config");
  if (ck.theta.layout() != *net_.layout)
    throw std::invalid_argument("resume: checkpoint layout does not match network");

  theta_ = ck.theta;
  outer_ = ck.outer;
  adam_actor_ = ck.adam_actor;
  adam_critic_ = ck.adam_critic;
  inner_rng_.set_state(ck.inner_rng_state);
  envs_.clear();
  action_rngs_.clear();
  tracker_ = EpisodeTracker(n);
  for (int i = 0; i < n; ++i) {
    envs_.push_back(make_env(cfg_.env));
    Env& env = *envs_.back();
    std::vector<double> state(ck.env_states[i].data(),
                              ck.env_states[i].data() + ck.env_states[i].size());
    env.set_state(state);
    env.set_steps_elapsed(static_cast<int>(ck.env_steps[i]));
    env.set_rng_state(ck.env_rng_states[i]);
    Rng a(0);
    a.set_state(ck.action_rng_states[i]);
    action_rngs_.push_back(a);
    tracker_.running_return[i] = ck.tracker_returns[i];
    tracker_.running_length[i] = static_cast<int>(ck.tracker_lengths[i]);
  }
  iterations_done_ = ck.iterations_done;
  transitions_done_ = ck.transitions_done;
  next_eval_ = ck.next_eval;
  eval_points_ = ck.eval_points;
  diagnostics_ = ck.diagnostics;
  best_mean_ = ck.best_mean;
  best_eval_index_ = ck.best_eval_index;
  best_theta_ = ck.best_theta;
}

Checkpoint TrainingRun::snapshot() const {
  Checkpoint ck;
  ck.env_id = cfg_.env;
  ck.theta = theta_;
  ck.outer = outer_;
  ck.adam_actor = adam_actor_;
  ck.adam_critic = adam_critic_;
  ck.inner_rng_state = inner_rng_.state();
  const int n = cfg_.ppo.num_envs;
  ck.env_rng_states.resize(n);
  ck.action_rng_states.resize(n);
  ck.env_steps.resize(n);
  ck.env_states.resize(n);
  ck.tracker_returns.resize(n);
  ck.tracker_lengths.resize(n);
  for (int i = 0; i < n; ++i) {
    ck.env_rng_states[i] = envs_[i]->rng_state();
    ck.action_rng_states[i] = action_rngs_[i].state();
    ck.env_steps[i] = static_cast<std::uint64_t>(envs_[i]->steps_elapsed());
    const std::vector<double> s = envs_[i]->state();
    ck.env_states[i] = Eigen::Map<const Eigen::VectorXd>(s.data(),
                                                         static_cast<Eigen::Index>(s.size()));
    ck.tracker_returns[i] = tracker_.running_return[i];
    ck.tracker_lengths[i] = tracker_.running_length[i];
  }
  ck.iterations_done = iterations_done_;
  ck.transitions_done = transitions_done_;
  ck.next_eval = next_eval_;
  ck.eval_points = eval_points_;
  ck.diagnostics = diagnostics_;
  ck.best_mean = best_mean_;
  ck.best_eval_index = best_eval_index_;
  ck.best_theta = best_theta_;
  return ck;
}

void TrainingRun::record_eval(double mean) {
  EvalPoint p;
  p.index = next_eval_;
  p.transitions = transitions_done_;
  p.mean_return = mean;
  eval_points_.push_back(p);
  if (eval_points_.size() == 1 || mean > best_mean_) {
    best_mean_ = mean;
    best_eval_index_ = p.index;
    best_theta_ = theta_;
  }
  if (on_eval) on_eval(p);
  next_eval_ += 1;
}

void TrainingRun::run_due_evals() {
  const std::uint64_t budget = cfg_.total_transitions;
  const auto num_evals = static_cast<std::uint64_t>(cfg_.num_intermediate_evals);
  while (next_eval_ <= num_evals &&
         transitions_done_ * num_evals >= next_eval_ * budget) {
    const std::uint64_t eval_seed = Rng(cfg_.seed).fork(kEvalKey).fork(next_eval_).state();
    const std::vector<double> returns = evaluate_policy(
        net_, theta_, cfg_.env, cfg_.eval_episodes_intermediate, eval_seed);
    record_eval(mean_of(returns));
  }
}

bool TrainingRun::step() {
  if (aborted_ || iterations_done_ >= total_iterations_) return false;
  run_due_evals();

  if (cfg_.reset_adam_between_iterations) {
    // moments restart cold each iteration; the schedule position is part of
    // the annealing contract and survives
    adam_actor_.m1().setZero();
    adam_actor_.m2().setZero();
    adam_critic_.m1().setZero();
    adam_critic_.m2().setZero();
  }

  const TransitionBatch batch = collect_rollout(net_, theta_, envs_, action_rngs_,
                                                cfg_.ppo.rollout_length,
                                                cfg_.ppo.reward_scale, &tracker_);
  tracker_.completed_returns.clear();
  tracker_.completed_lengths.clear();

  const AdvantageEstimate est = compute_gae(batch, cfg_.ppo.gamma, cfg_.ppo.gae_lambda);

  double bias_norm = 0.0;
  ParamVector theta_init = theta_;
  if (cfg_.outer.strategy == OuterStrategy::biased_init) {
    theta_init = biased_iteration_bias(theta_, outer_);
    bias_norm = cfg_.outer.alpha * outer_.momentum.norm();
  }

  const InnerLoopResult inner = inner_optimization_loop(
      net_, theta_init, batch, est, cfg_.ppo, adam_actor_, adam_critic_, inner_rng_);
  if (inner.aborted || !inner.theta_star.all_finite()) {
    aborted_ = true;
    return false;
  }

  const OuterStepResult res = outer_step(outer_, theta_, inner.theta_star);
  theta_ = res.theta_next;
  if (!theta_.all_finite()) {
    aborted_ = true;
    return false;
  }

  iterations_done_ += 1;
  transitions_done_ += static_cast<std::uint64_t>(batch.rows());

  IterationDiag d;
  d.iteration = iterations_done_;
  d.transitions = transitions_done_;
  d.outer_grad_norm = res.outer_grad_norm;
  d.momentum_effect_norm =
      cfg_.outer.strategy == OuterStrategy::biased_init ? bias_norm : res.momentum_effect_norm;
  d.policy_loss = inner.policy_loss;
  d.value_loss = inner.value_loss;
  d.clip_fraction = inner.clip_fraction;
  d.mean_ratio = inner.mean_ratio;
  d.active_fraction = inner.active_fraction;
  d.entropy = inner.entropy;
  diagnostics_.push_back(d);
  if (on_iteration) on_iteration(d);
  return true;
}

RunResult TrainingRun::finish() {
  if (!aborted_) run_due_evals();

  RunResult r;
  r.eval_points = eval_points_;
  r.diagnostics = diagnostics_;
  r.best_mean = best_mean_;
  r.best_eval_index = best_eval_index_;
  r.final_theta = theta_;
  r.best_theta = best_theta_;
  r.iterations_done = iterations_done_;
  r.transitions_done = transitions_done_;
  r.nan_aborted = aborted_;
  r.completed = !aborted_ && iterations_done_ >= total_iterations_;

  for (const EvalPoint& p : eval_points_) {
    if (p.mean_return > r.best_mean)
      throw std::logic_error("best-policy tracking missed an evaluation point");
  }

  if (r.completed) {
    const std::uint64_t abs_seed = Rng(cfg_.seed).fork(kAbsoluteKey).state();
    r.absolute_returns = evaluate_policy(net_, best_theta_, cfg_.env,
                                         cfg_.absolute_eval_episodes, abs_seed);
    r.absolute_mean = mean_of(r.absolute_returns);
    if (r.absolute_returns.size() > 1) {
      double ss = 0.0;
      for (double x : r.absolute_returns) {
        const double d = x - r.absolute_mean;
        ss += d * d;
      }
      const auto n = static_cast<double>(r.absolute_returns.size());
      r.absolute_stderr = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
  }
  return r;
}

RunResult train(const RunConfig& cfg) {
  TrainingRun run(cfg);
  while (run.step()) {
  }
  return run.finish();
}

}  // namespace ppolab
