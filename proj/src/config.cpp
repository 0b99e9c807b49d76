#include "ppolab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ppolab/env.hpp"

namespace ppolab {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where + " must be a JSON object");
}

// Pulls known keys out of an object and rejects leftovers, so typos surface
// immediately instead of silently running defaults.
class FieldReader {
 public:
  FieldReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    expect_object(j_, where_);
  }

  bool has(const char* key) const { return j_.contains(key); }

  std::string label(const char* key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  double number(const char* key, double fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number()) fail(label(key) + " must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(label(key) + " must be finite");
    return x;
  }

  int integer(const char* key, int fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(label(key) + " must be an integer");
    return v->get<int>();
  }

  std::uint64_t unsigned64(const char* key, std::uint64_t fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_number_integer() ||
        (!v->is_number_unsigned() && v->get<std::int64_t>() < 0))
      fail(label(key) + " must be a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(label(key) + " must be true or false");
    return v->get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(label(key) + " must be a string");
    return v->get<std::string>();
  }

  std::vector<int> int_array(const char* key, std::vector<int> fallback) {
    const json* v = take(key);
    if (!v) return fallback;
    if (!v->is_array()) fail(label(key) + " must be an array of integers");
    std::vector<int> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) fail(label(key) + " must be an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  const json* object(const char* key) { return take(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!taken_.count(it.key()))
        fail("unknown config key '" + (where_.empty() ? it.key() : where_ + "." + it.key()) +
             "'");
    }
  }

 private:
  const json* take(const char* key) {
    taken_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> taken_;
};

PpoConfig ppo_from_json(const json& j) {
  PpoConfig cfg;
  FieldReader r(j, "ppo");
  cfg.rollout_length = r.integer("rollout_length", cfg.rollout_length);
  cfg.num_envs = r.integer("num_envs", cfg.num_envs);
  cfg.num_epochs = r.integer("num_epochs", cfg.num_epochs);
  cfg.num_minibatches = r.integer("num_minibatches", cfg.num_minibatches);
  cfg.clip_epsilon = r.number("clip_epsilon", cfg.clip_epsilon);
  const bool has_value_clip = r.has("value_clip_epsilon");
  cfg.value_clip_epsilon = r.number("value_clip_epsilon", cfg.clip_epsilon);
  if (!has_value_clip) cfg.value_clip_epsilon = cfg.clip_epsilon;
  cfg.actor_lr = r.number("actor_lr", cfg.actor_lr);
  cfg.critic_lr = r.number("critic_lr", cfg.critic_lr);
  cfg.max_grad_norm = r.number("max_grad_norm", cfg.max_grad_norm);
  cfg.gamma = r.number("gamma", cfg.gamma);
  cfg.gae_lambda = r.number("gae_lambda", cfg.gae_lambda);
  cfg.reward_scale = r.number("reward_scale", cfg.reward_scale);
  cfg.anneal_lr = r.boolean("anneal_lr", cfg.anneal_lr);
  cfg.normalize_advantages = r.boolean("normalize_advantages", cfg.normalize_advantages);
  r.finish();
  return cfg;
}

OuterConfig outer_from_json(const json& j) {
  OuterConfig cfg;
  FieldReader r(j, "outer");
  const std::string name = r.string("strategy", outer_strategy_name(cfg.strategy));
  try {
    cfg.strategy = parse_outer_strategy(name);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  cfg.sigma = r.number("sigma", cfg.sigma);
  cfg.mu = r.number("mu", cfg.mu);
  cfg.alpha = r.number("alpha", cfg.alpha);
  r.finish();
  return cfg;
}

}  // namespace

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["env"] = cfg.env;
  j["seed"] = cfg.seed;
  j["total_transitions"] = cfg.total_transitions;
  j["num_intermediate_evals"] = cfg.num_intermediate_evals;
  j["eval_episodes_intermediate"] = cfg.eval_episodes_intermediate;
  j["absolute_eval_episodes"] = cfg.absolute_eval_episodes;
  j["reset_adam_between_iterations"] = cfg.reset_adam_between_iterations;
  j["network"] = json{{"hidden", cfg.network.hidden}};
  j["ppo"] = json{{"rollout_length", cfg.ppo.rollout_length},
                  {"num_envs", cfg.ppo.num_envs},
                  {"num_epochs", cfg.ppo.num_epochs},
                  {"num_minibatches", cfg.ppo.num_minibatches},
                  {"clip_epsilon", cfg.ppo.clip_epsilon},
                  {"value_clip_epsilon", cfg.ppo.value_clip_epsilon},
                  {"actor_lr", cfg.ppo.actor_lr},
                  {"critic_lr", cfg.ppo.critic_lr},
                  {"max_grad_norm", cfg.ppo.max_grad_norm},
                  {"gamma", cfg.ppo.gamma},
                  {"gae_lambda", cfg.ppo.gae_lambda},
                  {"reward_scale", cfg.ppo.reward_scale},
                  {"anneal_lr", cfg.ppo.anneal_lr},
                  {"normalize_advantages", cfg.ppo.normalize_advantages}};
  j["outer"] = json{{"strategy", outer_strategy_name(cfg.outer.strategy)},
                    {"sigma", cfg.outer.sigma},
                    {"mu", cfg.outer.mu},
                    {"alpha", cfg.outer.alpha}};
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  FieldReader r(j, "");
  cfg.env = r.string("env", cfg.env);
  cfg.seed = r.unsigned64("seed", cfg.seed);
  cfg.total_transitions = r.unsigned64("total_transitions", cfg.total_transitions);
  cfg.num_intermediate_evals = r.integer("num_intermediate_evals", cfg.num_intermediate_evals);
  cfg.eval_episodes_intermediate =
      r.integer("eval_episodes_intermediate", cfg.eval_episodes_intermediate);
  cfg.absolute_eval_episodes = r.integer("absolute_eval_episodes", cfg.absolute_eval_episodes);
  cfg.reset_adam_between_iterations =
      r.boolean("reset_adam_between_iterations", cfg.reset_adam_between_iterations);
  if (const json* network = r.object("network")) {
    FieldReader nr(*network, "network");
    cfg.network.hidden = nr.int_array("hidden", cfg.network.hidden);
    nr.finish();
  }
  if (const json* ppo = r.object("ppo")) cfg.ppo = ppo_from_json(*ppo);
  if (const json* outer = r.object("outer")) cfg.outer = outer_from_json(*outer);
  r.finish();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(load_json_file(path));
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  out.flush();
  if (!out) fail("write failed for '" + path + "'");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail("'" + path + "' is not valid JSON: " + e.what());
  }
}

void validate(const RunConfig& cfg) {
  bool known = false;
  for (const std::string& id : env_ids()) known = known || id == cfg.env;
  if (!known) {
    std::ostringstream msg;
    msg << "unknown env '" << cfg.env << "' (available:";
    for (const std::string& id : env_ids()) msg << " " << id;
    msg << ")";
    fail(msg.str());
  }
  for (int h : cfg.network.hidden)
    if (h < 1) fail("network.hidden layer widths must be >= 1");
  try {
    validate(cfg.ppo);
    validate(cfg.outer);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (cfg.num_intermediate_evals < 1) fail("num_intermediate_evals must be >= 1");
  if (cfg.eval_episodes_intermediate < 1) fail("eval_episodes_intermediate must be >= 1");
  if (cfg.absolute_eval_episodes < 1) fail("absolute_eval_episodes must be >= 1");
  const std::uint64_t per_iter =
      static_cast<std::uint64_t>(cfg.ppo.rollout_length) *
      static_cast<std::uint64_t>(cfg.ppo.num_envs);
  if (cfg.total_transitions < per_iter)
    fail("total_transitions must cover at least one iteration of rollout_length * num_envs");
  if (cfg.total_transitions % per_iter != 0)
    fail("total_transitions must be a multiple of rollout_length * num_envs");
}

const json* get_json_path(const json& root, const std::string& dotted) {
  const json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
    if (dot == std::string::npos) return node;
    start = dot + 1;
  }
}

void set_json_path(json& root, const std::string& dotted, const json& value) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (!node->is_object() || !node->contains(key))
      fail("no such config key '" + dotted + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  const bool both_numbers = node->is_number() && value.is_number();
  if (both_numbers) {
    if (node->is_number_float()) {
      *node = value.get<double>();
    } else if (value.is_number_float()) {
      fail("config key '" + dotted + "' takes an integer");
    } else {
      *node = value;
    }
    return;
  }
  if (node->type() != value.type()) {
    fail("config key '" + dotted + "' takes a " + std::string(node->type_name()) + ", got " +
         value.type_name());
  }
  *node = value;
}

json parse_override_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

void apply_overrides(json& root, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const std::size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      fail("override '" + ov + "' is not of the form path=value");
    set_json_path(root, ov.substr(0, eq), parse_override_value(ov.substr(eq + 1)));
  }
}

}  // namespace ppolab
