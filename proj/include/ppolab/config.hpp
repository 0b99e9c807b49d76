#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppolab/inner_loop.hpp"
#include "ppolab/outer.hpp"

namespace ppolab {

using json = nlohmann::ordered_json;

// Raised on malformed configs, unknown keys, bad override paths or values.
// The command line maps it to exit code 2 before any work starts.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NetworkConfig {
  std::vector<int> hidden = {64, 64};
};

// Everything a single training run depends on. Serializing and reparsing is
// the identity, so a resolved config replays a run exactly.
struct RunConfig {
  std::string env = "cartpole-discrete";
  std::uint64_t seed = 1;
  std::uint64_t total_transitions = 102400;
  int num_intermediate_evals = 10;
  int eval_episodes_intermediate = 32;
  int absolute_eval_episodes = 128;
  bool reset_adam_between_iterations = false;
  NetworkConfig network;
  PpoConfig ppo;
  OuterConfig outer;
};

// Full-field emission: every value appears explicitly, defaults included, so
// the output stands alone as a resolved config.
json run_config_to_json(const RunConfig& cfg);

// Strict parse: unknown keys and type mismatches are errors. A missing
// value_clip_epsilon follows clip_epsilon.
RunConfig run_config_from_json(const json& j);

RunConfig load_run_config(const std::string& path);
void save_json(const std::string& path, const json& j);
json load_json_file(const std::string& path);

// Checks ranges across all sub-configs and that the transition budget splits
// into whole outer iterations. Throws ConfigError.
void validate(const RunConfig& cfg);

// Dotted-path helpers shared by CLI overrides and sweep axes. Paths address
// existing keys only ("ppo.clip_epsilon", "outer.sigma"); the replacement
// must keep the JSON type of the value it replaces.
const json* get_json_path(const json& root, const std::string& dotted);
void set_json_path(json& root, const std::string& dotted, const json& value);

// "0.5" -> number, "true" -> bool, "[1,2]" -> array, anything that does not
// parse as JSON -> string.
json parse_override_value(const std::string& text);

// Applies "path=value" strings on top of a config tree.
void apply_overrides(json& root, const std::vector<std::string>& overrides);

}  // namespace ppolab
