#include "ppolab/presets.hpp"

#include <sstream>

namespace ppolab {

namespace {

[[noreturn]] void unknown_name(const std::string& kind, const std::string& name,
                               const std::vector<std::string>& known) {
  std::ostringstream msg;
  msg << "unknown " << kind << " '" << name << "'; available:";
  for (const std::string& k : known) msg << ' ' << k;
  throw ConfigError(msg.str());
}

// ---- desk-scale run presets -------------------------------------------------

RunConfig chain_default() {
  RunConfig cfg;
  cfg.env = "chain-mdp";
  cfg.network.hidden = {32};
  cfg.ppo.rollout_length = 16;
  cfg.ppo.num_envs = 8;
  cfg.ppo.num_epochs = 4;
  cfg.ppo.num_minibatches = 4;
  cfg.ppo.actor_lr = 1e-3;
  cfg.ppo.critic_lr = 1e-3;
  cfg.ppo.gamma = 0.99;
  cfg.ppo.gae_lambda = 0.95;
  cfg.total_transitions = 16 * 8 * 512;  // 65536, well under the learning-check cap
  cfg.num_intermediate_evals = 16;
  cfg.eval_episodes_intermediate = 32;
  cfg.absolute_eval_episodes = 128;
  return cfg;
}

RunConfig cartpole_default() {
  RunConfig cfg;
  cfg.env = "cartpole-discrete";
  cfg.network.hidden = {32, 32};
  cfg.ppo.rollout_length = 32;
  cfg.ppo.num_envs = 16;
  cfg.ppo.num_epochs = 4;
  cfg.ppo.num_minibatches = 4;
  cfg.ppo.actor_lr = 2.5e-4;
  cfg.ppo.critic_lr = 2.5e-4;
  cfg.ppo.gamma = 0.99;
  cfg.ppo.gae_lambda = 0.95;
  cfg.total_transitions = 32 * 16 * 800;  // 409600
  cfg.num_intermediate_evals = 16;
  cfg.eval_episodes_intermediate = 16;
  cfg.absolute_eval_episodes = 64;
  return cfg;
}

RunConfig cartpole_small_clip() {
  // Deliberately conservative clip range: the inner loop barely moves the
  // policy per iteration, which is the regime where outer step scaling has
  // room to help.
  RunConfig cfg = cartpole_default();
  cfg.ppo.clip_epsilon = 0.1;
  cfg.ppo.value_clip_epsilon = 0.1;
  cfg.total_transitions = 32 * 16 * 300;  // 153600, sized for a 4-point sweep
  cfg.num_intermediate_evals = 8;
  return cfg;
}

RunConfig pendulum_default() {
  RunConfig cfg;
  cfg.env = "pendulum-continuous";
  cfg.network.hidden = {64, 64};
  cfg.ppo.rollout_length = 64;
  cfg.ppo.num_envs = 8;
  cfg.ppo.num_epochs = 8;
  cfg.ppo.num_minibatches = 8;
  cfg.ppo.actor_lr = 3e-4;
  cfg.ppo.critic_lr = 1e-3;
  cfg.ppo.gamma = 0.95;
  cfg.ppo.gae_lambda = 0.9;
  cfg.ppo.reward_scale = 0.1;
  cfg.total_transitions = 64 * 8 * 400;  // 204800
  cfg.num_intermediate_evals = 10;
  cfg.eval_episodes_intermediate = 8;
  cfg.absolute_eval_episodes = 32;
  return cfg;
}

RunConfig maze_default() {
  RunConfig cfg;
  cfg.env = "maze-grid";
  cfg.network.hidden = {64};
  cfg.ppo.rollout_length = 32;
  cfg.ppo.num_envs = 16;
  cfg.ppo.num_epochs = 4;
  cfg.ppo.num_minibatches = 8;
  cfg.ppo.actor_lr = 5e-4;
  cfg.ppo.critic_lr = 5e-4;
  cfg.ppo.gamma = 0.99;
  cfg.ppo.gae_lambda = 0.95;
  cfg.total_transitions = 32 * 16 * 400;  // 204800
  cfg.num_intermediate_evals = 10;
  cfg.eval_episodes_intermediate = 16;
  cfg.absolute_eval_episodes = 64;
  return cfg;
}

const std::vector<std::pair<std::string, RunConfig (*)()>>& run_preset_table() {
  static const std::vector<std::pair<std::string, RunConfig (*)()>> table = {
      {"chain-default", chain_default},
      {"cartpole-default", cartpole_default},
      {"cartpole-small-clip", cartpole_small_clip},
      {"pendulum-default", pendulum_default},
      {"maze-default", maze_default},
  };
  return table;
}

// ---- reference tuning rows --------------------------------------------------

struct TaskRow {
  const char* task;
  int num_envs, rollout, epochs, minibatches;
  double actor_lr, critic_lr, gamma, lambda, clip, max_grad_norm, reward_scale;
  double lr_sigma;                 // tuned outer learning rate
  double nesterov_sigma, nesterov_mu;
  double biased_alpha, biased_mu;
};

// Tuned baselines and per-strategy outer optima for the fourteen benchmark
// tasks, kept verbatim as fixtures for round-trip and sweep tests.
constexpr TaskRow kTaskRows[] = {
    {"ant", 128, 8, 2, 32, 3.0e-4, 1.4e-4, 0.98, 0.70, 0.21, 4.85, 0.14,
     0.5, 0.7, 0.2, 0.1, 0.8},
    {"asterix", 128, 128, 3, 64, 8.3e-4, 2.1e-5, 1.00, 0.20, 0.30, 2.28, 6.62,
     1.1, 0.6, 0.5, 0.1, 0.4},
    {"breakout", 64, 16, 14, 16, 1.8e-4, 1.2e-4, 0.90, 0.53, 0.16, 0.25, 5.19,
     1.1, 0.9, 0.1, 0.0, 0.5},
    {"freeway", 64, 128, 10, 2, 6.9e-4, 1.3e-4, 0.98, 0.70, 0.15, 4.71, 6.64,
     1.6, 0.9, 0.3, 0.2, 0.5},
    {"game_2048", 1024, 8, 9, 32, 4.9e-4, 3.8e-4, 0.99, 0.04, 0.28, 2.56, 0.13,
     1.3, 0.8, 0.4, 0.3, 0.9},
    {"halfcheetah", 64, 64, 3, 16, 3.9e-4, 4.4e-4, 0.99, 0.94, 0.13, 2.40, 0.46,
     0.5, 0.4, 0.5, 0.2, 0.8},
    {"hopper", 64, 64, 2, 64, 6.3e-4, 3.6e-4, 1.00, 0.96, 0.17, 3.54, 3.95,
     1.5, 0.9, 0.4, 0.5, 0.8},
    {"humanoid", 256, 64, 4, 64, 1.0e-4, 1.0e-4, 0.98, 0.89, 0.34, 3.30, 0.14,
     1.9, 0.5, 0.7, 0.1, 0.4},
    {"humanoidstandup", 64, 64, 3, 32, 3.0e-4, 8.2e-4, 0.99, 0.98, 0.10, 4.65, 0.35,
     2.1, 0.5, 0.3, 0.5, 0.8},
    {"maze", 256, 32, 7, 64, 6.5e-4, 4.3e-4, 0.98, 0.66, 0.14, 2.46, 1.97,
     0.9, 0.9, 0.0, 0.1, 0.5},
    {"rubiks_cube", 64, 256, 13, 4, 9.0e-4, 2.2e-4, 0.99, 0.55, 0.14, 3.45, 11.03,
     1.7, 0.5, 0.7, 0.4, 0.3},
    {"snake", 1024, 8, 11, 4, 6.0e-4, 6.0e-4, 1.00, 0.46, 0.12, 2.52, 20.48,
     2.3, 1.0, 0.4, 0.7, 0.5},
    {"space_invaders", 128, 32, 16, 2, 3.0e-5, 1.1e-4, 0.98, 1.00, 0.25, 0.35, 0.61,
     1.3, 0.8, 0.2, 0.1, 0.9},
    {"walker2d", 256, 32, 4, 64, 5.4e-4, 8.2e-4, 1.00, 0.92, 0.12, 3.74, 22.54,
     2.0, 0.9, 0.6, 0.4, 0.0},
};

PpoConfig row_ppo(const TaskRow& row) {
  PpoConfig ppo;
  ppo.num_envs = row.num_envs;
  ppo.rollout_length = row.rollout;
  ppo.num_epochs = row.epochs;
  ppo.num_minibatches = row.minibatches;
  ppo.actor_lr = row.actor_lr;
  ppo.critic_lr = row.critic_lr;
  ppo.gamma = row.gamma;
  ppo.gae_lambda = row.lambda;
  ppo.clip_epsilon = row.clip;
  ppo.value_clip_epsilon = row.clip;
  ppo.max_grad_norm = row.max_grad_norm;
  ppo.reward_scale = row.reward_scale;
  return ppo;
}

std::vector<TuningPreset> build_tuning_presets() {
  std::vector<TuningPreset> presets;
  for (const TaskRow& row : kTaskRows) {
    const PpoConfig ppo = row_ppo(row);
    const std::string task = row.task;

    TuningPreset baseline{task + "-baseline", task, ppo, OuterConfig{}};
    presets.push_back(baseline);

    OuterConfig lr;
    lr.strategy = OuterStrategy::outer_lr;
    lr.sigma = row.lr_sigma;
    presets.push_back({task + "-outer-lr", task, ppo, lr});

    OuterConfig nesterov;
    nesterov.strategy = OuterStrategy::nesterov;
    nesterov.sigma = row.nesterov_sigma;
    nesterov.mu = row.nesterov_mu;
    presets.push_back({task + "-nesterov", task, ppo, nesterov});

    OuterConfig biased;
    biased.strategy = OuterStrategy::biased_init;
    biased.alpha = row.biased_alpha;
    biased.mu = row.biased_mu;
    presets.push_back({task + "-biased", task, ppo, biased});
  }
  return presets;
}

// ---- grids -------------------------------------------------------------------

std::vector<double> tenths(int from, int to) {
  std::vector<double> values;
  for (int i = from; i <= to; ++i) values.push_back(static_cast<double>(i) / 10.0);
  return values;
}

std::vector<GridPreset> build_grid_presets() {
  return {
      {"outer-lr-grid", {{"outer.sigma", tenths(1, 40)}}},
      {"nesterov-grid", {{"outer.sigma", tenths(1, 10)}, {"outer.mu", tenths(1, 9)}}},
      {"biased-grid", {{"outer.alpha", tenths(1, 10)}, {"outer.mu", tenths(0, 9)}}},
  };
}

}  // namespace

std::vector<std::string> run_preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, make] : run_preset_table()) names.push_back(name);
  return names;
}

RunConfig run_preset(const std::string& name) {
  for (const auto& [known, make] : run_preset_table())
    if (known == name) return make();
  unknown_name("run preset", name, run_preset_names());
}

const std::vector<TuningPreset>& tuning_presets() {
  static const std::vector<TuningPreset> presets = build_tuning_presets();
  return presets;
}

const TuningPreset& tuning_preset(const std::string& name) {
  for (const TuningPreset& p : tuning_presets())
    if (p.name == name) return p;
  std::vector<std::string> names;
  for (const TuningPreset& p : tuning_presets()) names.push_back(p.name);
  unknown_name("tuning preset", name, names);
}

json tuning_preset_to_json(const TuningPreset& preset) {
  // The ppo and outer blocks reuse the run-config serialization so byte-level
  // round trips hold across both document kinds.
  RunConfig carrier;
  carrier.ppo = preset.ppo;
  carrier.outer = preset.outer;
  const json full = run_config_to_json(carrier);
  json j;
  j["preset"] = preset.name;
  j["task"] = preset.task;
  j["ppo"] = full["ppo"];
  j["outer"] = full["outer"];
  return j;
}

TuningPreset tuning_preset_from_json(const json& j) {
  if (!j.is_object() || !j.contains("preset") || !j.contains("task"))
    throw ConfigError("tuning preset needs 'preset' and 'task' fields");
  // Route the blocks through the strict run-config parser.
  json carrier = run_config_to_json(RunConfig{});
  if (j.contains("ppo")) carrier["ppo"] = j.at("ppo");
  if (j.contains("outer")) carrier["outer"] = j.at("outer");
  const RunConfig parsed = run_config_from_json(carrier);
  TuningPreset preset;
  preset.name = j.at("preset").get<std::string>();
  preset.task = j.at("task").get<std::string>();
  preset.ppo = parsed.ppo;
  preset.outer = parsed.outer;
  return preset;
}

const std::vector<GridPreset>& grid_presets() {
  static const std::vector<GridPreset> grids = build_grid_presets();
  return grids;
}

const GridPreset& grid_preset(const std::string& name) {
  for (const GridPreset& g : grid_presets())
    if (g.name == name) return g;
  std::vector<std::string> names;
  for (const GridPreset& g : grid_presets()) names.push_back(g.name);
  unknown_name("grid preset", name, names);
}

const std::vector<SweepRange>& baseline_search_ranges() {
  static const std::vector<SweepRange> ranges = {
      {"ppo.num_envs", 64, 1024, SampleScale::pow2},
      {"ppo.rollout_length", 4, 256, SampleScale::pow2},
      {"ppo.num_epochs", 1, 16, SampleScale::integer},
      {"ppo.num_minibatches", 1, 64, SampleScale::pow2},
      {"ppo.actor_lr", 1e-5, 1e-3, SampleScale::log},
      {"ppo.critic_lr", 1e-5, 1e-3, SampleScale::log},
      {"ppo.gamma", 0.9, 1.0, SampleScale::linear},
      {"ppo.gae_lambda", 0.0, 1.0, SampleScale::linear},
      {"ppo.clip_epsilon", 0.1, 0.5, SampleScale::linear},
      {"ppo.max_grad_norm", 0.1, 5.0, SampleScale::linear},
      {"ppo.reward_scale", 0.1, 100.0, SampleScale::log},
  };
  return ranges;
}

NormalizationTable reference_normalization_table() {
  NormalizationTable table;
  table.range["ant"] = {-2958.14, 13466.48};
  table.range["asterix"] = {0.30, 64.46};
  table.range["breakout"] = {0.00, 92.86};
  table.range["freeway"] = {0.00, 66.13};
  table.range["game_2048"] = {989.50, 29084.63};
  table.range["halfcheetah"] = {-587.37, 7859.28};
  table.range["hopper"] = {21.03, 3697.39};
  table.range["humanoid"] = {207.63, 11851.71};
  table.range["humanoidstandup"] = {6686.00, 71897.67};
  table.range["maze"] = {0.03, 0.84};
  table.range["rubiks_cube"] = {0.00, 0.66};
  table.range["snake"] = {0.00, 92.55};
  table.range["space_invaders"] = {0.00, 191.80};
  table.range["walker2d"] = {-32.44, 2558.61};
  return table;
}

std::vector<std::string> all_preset_names() {
  std::vector<std::string> names = run_preset_names();
  for (const TuningPreset& p : tuning_presets()) names.push_back(p.name);
  for (const GridPreset& g : grid_presets()) names.push_back(g.name);
  names.push_back("normalization-table");
  return names;
}

json preset_document(const std::string& name) {
  for (const auto& [known, make] : run_preset_table())
    if (known == name) return run_config_to_json(make());
  for (const TuningPreset& p : tuning_presets())
    if (p.name == name) return tuning_preset_to_json(p);
  for (const GridPreset& g : grid_presets())
    if (g.name == name) {
      json j;
      j["preset"] = g.name;
      json axes = json::object();
      for (const auto& [path, values] : g.axes) axes[path] = values;
      j["axes"] = axes;
      return j;
    }
  if (name == "normalization-table") {
    json j;
    j["preset"] = name;
    json rows = json::object();
    for (const auto& [task, r] : reference_normalization_table().range)
      rows[task] = json::array({r.first, r.second});
    j["ranges"] = rows;
    return j;
  }
  unknown_name("preset", name, all_preset_names());
}

}  // namespace ppolab
