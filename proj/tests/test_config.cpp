#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "ppolab/checkpoint.hpp"
#include "ppolab/config.hpp"

using namespace ppolab;

namespace {

// Scratch file that cleans up after itself; tests run concurrently with other
// test binaries, so names carry a per-binary prefix.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / ("ppolab_cfgtest_" + name)).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out.good());
}

bool message_contains(const std::exception& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

// A config with no field left at its default, so round-trip tests cannot pass
// by accidentally reconstructing defaults.
RunConfig busy_config() {
  RunConfig cfg;
  cfg.env = "chain-mdp";
  cfg.seed = 987654321;
  cfg.total_transitions = 3 * 16 * 4;
  cfg.num_intermediate_evals = 3;
  cfg.eval_episodes_intermediate = 5;
  cfg.absolute_eval_episodes = 7;
  cfg.reset_adam_between_iterations = true;
  cfg.network.hidden = {12, 7};
  cfg.ppo.rollout_length = 16;
  cfg.ppo.num_envs = 4;
  cfg.ppo.num_epochs = 2;
  cfg.ppo.num_minibatches = 2;
  cfg.ppo.clip_epsilon = 0.15;
  cfg.ppo.value_clip_epsilon = 0.25;
  cfg.ppo.actor_lr = 1e-3;
  cfg.ppo.critic_lr = 2e-3;
  cfg.ppo.max_grad_norm = 1.5;
  cfg.ppo.gamma = 0.9;
  cfg.ppo.gae_lambda = 0.8;
  cfg.ppo.reward_scale = 2.0;
  cfg.ppo.anneal_lr = false;
  cfg.ppo.normalize_advantages = false;
  cfg.outer.strategy = OuterStrategy::nesterov;
  cfg.outer.sigma = 0.7;
  cfg.outer.mu = 0.4;
  cfg.outer.alpha = 0.0;
  return cfg;
}

uint64_t bits(double x) { return std::bit_cast<uint64_t>(x); }

}  // namespace

TEST_CASE("serialize then parse is the identity on the JSON text") {
  for (const RunConfig& cfg : {RunConfig{}, busy_config()}) {
    json j = run_config_to_json(cfg);
    RunConfig back = run_config_from_json(j);
    json j2 = run_config_to_json(back);
    CHECK(j.dump() == j2.dump());
  }
}

TEST_CASE("every field survives a round trip") {
  RunConfig cfg = busy_config();
  RunConfig back = run_config_from_json(run_config_to_json(cfg));
  CHECK(back.env == cfg.env);
  CHECK(back.seed == cfg.seed);
  CHECK(back.total_transitions == cfg.total_transitions);
  CHECK(back.num_intermediate_evals == cfg.num_intermediate_evals);
  CHECK(back.eval_episodes_intermediate == cfg.eval_episodes_intermediate);
  CHECK(back.absolute_eval_episodes == cfg.absolute_eval_episodes);
  CHECK(back.reset_adam_between_iterations == cfg.reset_adam_between_iterations);
  CHECK(back.network.hidden == cfg.network.hidden);
  CHECK(back.ppo.rollout_length == cfg.ppo.rollout_length);
  CHECK(back.ppo.num_envs == cfg.ppo.num_envs);
  CHECK(back.ppo.num_epochs == cfg.ppo.num_epochs);
  CHECK(back.ppo.num_minibatches == cfg.ppo.num_minibatches);
  CHECK(back.ppo.clip_epsilon == cfg.ppo.clip_epsilon);
  CHECK(back.ppo.value_clip_epsilon == cfg.ppo.value_clip_epsilon);
  CHECK(back.ppo.actor_lr == cfg.ppo.actor_lr);
  CHECK(back.ppo.critic_lr == cfg.ppo.critic_lr);
  CHECK(back.ppo.max_grad_norm == cfg.ppo.max_grad_norm);
  CHECK(back.ppo.gamma == cfg.ppo.gamma);
  CHECK(back.ppo.gae_lambda == cfg.ppo.gae_lambda);
  CHECK(back.ppo.reward_scale == cfg.ppo.reward_scale);
  CHECK(back.ppo.anneal_lr == cfg.ppo.anneal_lr);
  CHECK(back.ppo.normalize_advantages == cfg.ppo.normalize_advantages);
  CHECK(back.outer.strategy == cfg.outer.strategy);
  CHECK(back.outer.sigma == cfg.outer.sigma);
  CHECK(back.outer.mu == cfg.outer.mu);
  CHECK(back.outer.alpha == cfg.outer.alpha);
}

TEST_CASE("emitted config is fully resolved") {
  // Every key appears even when it holds the default, so the file replays a
  // run without consulting compiled-in defaults.
  json j = run_config_to_json(RunConfig{});
  for (const char* k :
       {"env", "seed", "total_transitions", "num_intermediate_evals",
        "eval_episodes_intermediate", "absolute_eval_episodes",
        "reset_adam_between_iterations", "network", "ppo", "outer"}) {
    CHECK(j.contains(k));
  }
  for (const char* k :
       {"rollout_length", "num_envs", "num_epochs", "num_minibatches", "clip_epsilon",
        "value_clip_epsilon", "actor_lr", "critic_lr", "max_grad_norm", "gamma", "gae_lambda",
        "reward_scale", "anneal_lr", "normalize_advantages"}) {
    CHECK(j["ppo"].contains(k));
  }
  for (const char* k : {"strategy", "sigma", "mu", "alpha"}) CHECK(j["outer"].contains(k));
  CHECK(j["outer"]["strategy"] == "standard");
  CHECK(j["network"]["hidden"] == json::array({64, 64}));
}

TEST_CASE("missing value_clip_epsilon follows clip_epsilon") {
  json j = run_config_to_json(RunConfig{});
  j["ppo"]["clip_epsilon"] = 0.3;
  j["ppo"].erase("value_clip_epsilon");
  RunConfig cfg = run_config_from_json(j);
  CHECK(cfg.ppo.value_clip_epsilon == 0.3);

  // An explicit value wins.
  j["ppo"]["value_clip_epsilon"] = 0.05;
  CHECK(run_config_from_json(j).ppo.value_clip_epsilon == 0.05);
}

TEST_CASE("partial configs fill the gaps with defaults") {
  json j = json::object();
  j["env"] = "chain-mdp";
  j["ppo"] = {{"gamma", 0.5}};
  RunConfig cfg = run_config_from_json(j);
  CHECK(cfg.env == "chain-mdp");
  CHECK(cfg.ppo.gamma == 0.5);
  CHECK(cfg.ppo.rollout_length == RunConfig{}.ppo.rollout_length);
  CHECK(cfg.seed == RunConfig{}.seed);
}

TEST_CASE("unknown keys are rejected by name") {
  json j = run_config_to_json(RunConfig{});
  j["sede"] = 1;
  CHECK_THROWS_WITH_AS(run_config_from_json(j), doctest::Contains("unknown config key 'sede'"),
                       ConfigError);

  json j2 = run_config_to_json(RunConfig{});
  j2["ppo"]["clip_eps"] = 0.2;
  CHECK_THROWS_WITH_AS(run_config_from_json(j2),
                       doctest::Contains("unknown config key 'ppo.clip_eps'"), ConfigError);
}

TEST_CASE("type mismatches are rejected with the dotted key") {
  auto expect_reject = [](json j, const std::string& needle) {
    try {
      run_config_from_json(j);
      FAIL_CHECK("expected rejection mentioning '" << needle << "'");
    } catch (const ConfigError& e) {
      CHECK_MESSAGE(message_contains(e, needle), e.what());
    }
  };

  json base = run_config_to_json(RunConfig{});

  json j = base;
  j["seed"] = "one";
  expect_reject(j, "seed");

  j = base;
  j["seed"] = -3;
  expect_reject(j, "non-negative");

  j = base;
  j["ppo"]["num_epochs"] = 2.5;
  expect_reject(j, "ppo.num_epochs");

  j = base;
  j["ppo"]["gamma"] = std::nan("");
  expect_reject(j, "finite");

  j = base;
  j["ppo"]["anneal_lr"] = 1;
  expect_reject(j, "true or false");

  j = base;
  j["network"]["hidden"] = json::array({16, 2.5});
  expect_reject(j, "array of integers");

  j = base;
  j["outer"]["strategy"] = "momentum";
  expect_reject(j, "momentum");

  j = base;
  j["ppo"] = 4;
  expect_reject(j, "object");
}

TEST_CASE("integer-valued floats are accepted for float fields") {
  json j = run_config_to_json(RunConfig{});
  j["outer"]["sigma"] = 2;  // JSON integer into a double slot
  CHECK(run_config_from_json(j).outer.sigma == 2.0);
}

TEST_CASE("validate checks ranges and the budget split") {
  RunConfig cfg = busy_config();
  CHECK_NOTHROW(validate(cfg));

  RunConfig bad = cfg;
  bad.env = "lunar-lander";
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("chain-mdp"), ConfigError);

  bad = cfg;
  bad.network.hidden = {16, 0};
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("hidden"), ConfigError);

  bad = cfg;
  bad.total_transitions = 16 * 4 + 1;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("multiple"), ConfigError);

  bad = cfg;
  bad.total_transitions = 16 * 4 - 4;
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("at least one iteration"), ConfigError);

  bad = cfg;
  bad.num_intermediate_evals = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = cfg;
  bad.ppo.clip_epsilon = 0.0;  // delegated to the ppo validator
  CHECK_THROWS_AS(validate(bad), ConfigError);

  bad = cfg;
  bad.outer.sigma = -1.0;  // delegated to the outer validator
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("dotted-path reads and writes") {
  json j = run_config_to_json(RunConfig{});

  const json* v = get_json_path(j, "ppo.clip_epsilon");
  REQUIRE(v != nullptr);
  CHECK(*v == 0.2);
  CHECK(get_json_path(j, "ppo.clip") == nullptr);
  CHECK(get_json_path(j, "seed.x") == nullptr);

  set_json_path(j, "ppo.clip_epsilon", json(0.15));
  CHECK(j["ppo"]["clip_epsilon"] == 0.15);

  // Ints coerce into float slots, but float values cannot land on int slots
  // and the JSON type must otherwise match what it replaces.
  set_json_path(j, "outer.sigma", json(3));
  CHECK(j["outer"]["sigma"] == 3.0);
  CHECK(j["outer"]["sigma"].is_number_float());
  CHECK_THROWS_WITH_AS(set_json_path(j, "ppo.num_epochs", json(2.5)),
                       doctest::Contains("takes an integer"), ConfigError);
  CHECK_THROWS_WITH_AS(set_json_path(j, "env", json(7)), doctest::Contains("takes a"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(set_json_path(j, "ppo.nope", json(1)),
                       doctest::Contains("no such config key 'ppo.nope'"), ConfigError);

  set_json_path(j, "network.hidden", json::array({32}));
  CHECK(j["network"]["hidden"] == json::array({32}));
}

TEST_CASE("override values parse as JSON with string fallback") {
  CHECK(parse_override_value("0.5") == json(0.5));
  CHECK(parse_override_value("7") == json(7));
  CHECK(parse_override_value("true") == json(true));
  CHECK(parse_override_value("[1,2]") == json::array({1, 2}));
  CHECK(parse_override_value("nesterov") == json("nesterov"));
  CHECK(parse_override_value("1e-3") == json(1e-3));
}

TEST_CASE("overrides apply on top of a config tree") {
  json j = run_config_to_json(RunConfig{});
  apply_overrides(j, {"ppo.clip_epsilon=0.15", "outer.strategy=lr", "outer.sigma=1.6",
                      "seed=9", "ppo.anneal_lr=false"});
  RunConfig cfg = run_config_from_json(j);
  CHECK(cfg.ppo.clip_epsilon == 0.15);
  CHECK(cfg.outer.strategy == OuterStrategy::outer_lr);
  CHECK(cfg.outer.sigma == 1.6);
  CHECK(cfg.seed == 9);
  CHECK(cfg.ppo.anneal_lr == false);

  CHECK_THROWS_WITH_AS(apply_overrides(j, {"just-a-word"}),
                       doctest::Contains("path=value"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_overrides(j, {"=3"}), doctest::Contains("path=value"), ConfigError);
  CHECK_THROWS_WITH_AS(apply_overrides(j, {"ppo.typo=3"}),
                       doctest::Contains("no such config key"), ConfigError);
  // A failed batch must not have applied earlier entries silently; callers
  // re-parse from the original tree, so all we pin here is the error.
}

TEST_CASE("config files round trip byte for byte") {
  TempFile f("roundtrip.json");
  save_json(f.path, run_config_to_json(busy_config()));
  std::string first = file_bytes(f.path);

  RunConfig reloaded = load_run_config(f.path);
  save_json(f.path, run_config_to_json(reloaded));
  CHECK(file_bytes(f.path) == first);
}

TEST_CASE("config file errors name the file") {
  CHECK_THROWS_WITH_AS(load_run_config("/nonexistent/dir/x.json"),
                       doctest::Contains("cannot open"), ConfigError);

  TempFile f("invalid.json");
  write_bytes(f.path, "{\"env\": ");
  CHECK_THROWS_WITH_AS(load_run_config(f.path), doctest::Contains("not valid JSON"), ConfigError);
}

// ---- checkpoint binary format ----

namespace {

std::shared_ptr<const ParamLayout> tiny_layout() {
  auto layout = std::make_shared<ParamLayout>();
  layout->add("actor.w0", 3, 2);
  layout->add("actor.b0", 3);
  layout->add("critic.w0", 1, 2);
  layout->add("critic.b0", 1);
  return layout;
}

Checkpoint busy_checkpoint() {
  auto layout = tiny_layout();
  Checkpoint ck;
  ck.env_id = "chain-mdp";

  ck.theta = ParamVector(layout);
  // Values picked to catch any text or lossy re-encoding: signed zero, a
  // denormal, extremes, and an irrational-looking double.
  double specials[] = {-0.0, 5e-324, 1.7976931348623157e308, -2.2250738585072014e-308,
                       0.1 + 0.2, -3.5, 42.0, 1e-17, 0.0, 7.25, -1.0 / 3.0, 2.5};
  for (int i = 0; i < ck.theta.data().size(); ++i) ck.theta.data()[i] = specials[i % 12];

  OuterConfig oc;
  oc.strategy = OuterStrategy::nesterov;
  oc.sigma = 0.7;
  oc.mu = 0.45;
  ck.outer = OuterState::make(oc, layout);
  ck.outer.momentum.data().setLinSpaced(ck.outer.momentum.data().size(), -0.5, 0.5);
  ck.outer.iteration = 11;

  AdamConfig ac;
  ac.lr = 1e-3;
  ac.schedule = LrSchedule::linear_to_zero;
  ac.total_steps = 640;
  ck.adam_actor = AdamState(ac, 9);
  ck.adam_actor.m1().setLinSpaced(9, 0.0, 1.0);
  ck.adam_actor.m2().setConstant(9, 1e-9);
  ck.adam_actor.set_step_count(123);
  AdamConfig cc;
  cc.lr = 2e-3;
  cc.max_grad_norm = 1.5;
  ck.adam_critic = AdamState(cc, 3);
  ck.adam_critic.m1().setConstant(3, -0.0);
  ck.adam_critic.m2().setConstant(3, 0.25);
  ck.adam_critic.set_step_count(7);

  ck.inner_rng_state = 0xDEADBEEFCAFEBABEull;
  ck.env_rng_states = {1, 0, 0xFFFFFFFFFFFFFFFFull};
  ck.action_rng_states = {42, 43, 44};
  ck.env_steps = {17, 0, 200};
  ck.env_states = {Eigen::VectorXd::LinSpaced(4, -1.0, 1.0), Eigen::VectorXd::Zero(1),
                   Eigen::VectorXd::Constant(2, -0.0)};
  ck.tracker_returns = Eigen::VectorXd::LinSpaced(3, 0.0, 5.5);
  ck.tracker_lengths = Eigen::VectorXd::Constant(3, 12.0);

  ck.iterations_done = 5;
  ck.transitions_done = 320;
  ck.next_eval = 3;

  ck.eval_points = {{0, 0, 1.5}, {1, 128, -0.0}, {2, 256, 2.25}};
  IterationDiag d;
  d.iteration = 4;
  d.transitions = 320;
  d.outer_grad_norm = 0.125;
  d.momentum_effect_norm = 0.0625;
  d.policy_loss = -0.01;
  d.value_loss = 0.5;
  d.clip_fraction = 0.25;
  d.mean_ratio = std::nan("");  // raw bit fidelity, not sanitization
  d.active_fraction = 1.0;
  d.entropy = 0.69;
  ck.diagnostics = {d};

  ck.best_mean = -std::numeric_limits<double>::infinity();
  ck.best_eval_index = 2;
  ck.best_theta = ParamVector(layout);
  ck.best_theta.data().setConstant(0.5);
  return ck;
}

void check_bitwise_equal(const Checkpoint& a, const Checkpoint& b) {
  CHECK(a.env_id == b.env_id);
  REQUIRE(a.theta.layout() == b.theta.layout());
  CHECK(std::memcmp(a.theta.raw(), b.theta.raw(), sizeof(double) * a.theta.data().size()) == 0);

  CHECK(a.outer.cfg.strategy == b.outer.cfg.strategy);
  CHECK(bits(a.outer.cfg.sigma) == bits(b.outer.cfg.sigma));
  CHECK(bits(a.outer.cfg.mu) == bits(b.outer.cfg.mu));
  CHECK(bits(a.outer.cfg.alpha) == bits(b.outer.cfg.alpha));
  CHECK(a.outer.iteration == b.outer.iteration);
  CHECK(a.outer.momentum.data().cwiseEqual(b.outer.momentum.data()).all());

  for (auto [x, y] : {std::pair{&a.adam_actor, &b.adam_actor},
                      std::pair{&a.adam_critic, &b.adam_critic}}) {
    CHECK(bits(x->config().lr) == bits(y->config().lr));
    CHECK(bits(x->config().beta1) == bits(y->config().beta1));
    CHECK(bits(x->config().beta2) == bits(y->config().beta2));
    CHECK(bits(x->config().eps) == bits(y->config().eps));
    CHECK(bits(x->config().max_grad_norm) == bits(y->config().max_grad_norm));
    CHECK(x->config().schedule == y->config().schedule);
    CHECK(x->config().total_steps == y->config().total_steps);
    CHECK(x->step_count() == y->step_count());
    REQUIRE(x->m1().size() == y->m1().size());
    CHECK(std::memcmp(x->m1().data(), y->m1().data(), sizeof(double) * x->m1().size()) == 0);
    CHECK(std::memcmp(x->m2().data(), y->m2().data(), sizeof(double) * x->m2().size()) == 0);
  }

  CHECK(a.inner_rng_state == b.inner_rng_state);
  CHECK(a.env_rng_states == b.env_rng_states);
  CHECK(a.action_rng_states == b.action_rng_states);
  CHECK(a.env_steps == b.env_steps);
  REQUIRE(a.env_states.size() == b.env_states.size());
  for (size_t i = 0; i < a.env_states.size(); ++i) {
    REQUIRE(a.env_states[i].size() == b.env_states[i].size());
    CHECK(std::memcmp(a.env_states[i].data(), b.env_states[i].data(),
                      sizeof(double) * a.env_states[i].size()) == 0);
  }
  CHECK(std::memcmp(a.tracker_returns.data(), b.tracker_returns.data(),
                    sizeof(double) * a.tracker_returns.size()) == 0);
  CHECK(std::memcmp(a.tracker_lengths.data(), b.tracker_lengths.data(),
                    sizeof(double) * a.tracker_lengths.size()) == 0);

  CHECK(a.iterations_done == b.iterations_done);
  CHECK(a.transitions_done == b.transitions_done);
  CHECK(a.next_eval == b.next_eval);

  REQUIRE(a.eval_points.size() == b.eval_points.size());
  for (size_t i = 0; i < a.eval_points.size(); ++i) {
    CHECK(a.eval_points[i].index == b.eval_points[i].index);
    CHECK(a.eval_points[i].transitions == b.eval_points[i].transitions);
    CHECK(bits(a.eval_points[i].mean_return) == bits(b.eval_points[i].mean_return));
  }
  REQUIRE(a.diagnostics.size() == b.diagnostics.size());
  for (size_t i = 0; i < a.diagnostics.size(); ++i) {
    const IterationDiag &x = a.diagnostics[i], &y = b.diagnostics[i];
    CHECK(x.iteration == y.iteration);
    CHECK(x.transitions == y.transitions);
    CHECK(bits(x.outer_grad_norm) == bits(y.outer_grad_norm));
    CHECK(bits(x.momentum_effect_norm) == bits(y.momentum_effect_norm));
    CHECK(bits(x.policy_loss) == bits(y.policy_loss));
    CHECK(bits(x.value_loss) == bits(y.value_loss));
    CHECK(bits(x.clip_fraction) == bits(y.clip_fraction));
    CHECK(bits(x.mean_ratio) == bits(y.mean_ratio));
    CHECK(bits(x.active_fraction) == bits(y.active_fraction));
    CHECK(bits(x.entropy) == bits(y.entropy));
  }

  CHECK(bits(a.best_mean) == bits(b.best_mean));
  CHECK(a.best_eval_index == b.best_eval_index);
  CHECK(a.best_theta.data().cwiseEqual(b.best_theta.data()).all());
}

}  // namespace

TEST_CASE("checkpoint save and load reproduce every field bit for bit") {
  Checkpoint ck = busy_checkpoint();
  TempFile f("ck_roundtrip.bin");
  checkpoint_save(f.path, ck);
  Checkpoint back = checkpoint_load(f.path);
  check_bitwise_equal(ck, back);

  // Signed zeros and the NaN diagnostic made it through as raw bit patterns.
  CHECK(bits(back.eval_points[1].mean_return) == bits(-0.0));
  CHECK(std::isnan(back.diagnostics[0].mean_ratio));
  CHECK(bits(back.theta.raw()[0]) == bits(-0.0));
  CHECK(back.theta.raw()[1] == 5e-324);
}

TEST_CASE("saving twice produces identical files") {
  Checkpoint ck = busy_checkpoint();
  TempFile f1("ck_a.bin"), f2("ck_b.bin");
  checkpoint_save(f1.path, ck);
  checkpoint_save(f2.path, ck);
  CHECK(file_bytes(f1.path) == file_bytes(f2.path));
}

TEST_CASE("checkpoint header starts with the documented magic and version") {
  Checkpoint ck = busy_checkpoint();
  TempFile f("ck_magic.bin");
  checkpoint_save(f.path, ck);
  std::string bytes = file_bytes(f.path);
  REQUIRE(bytes.size() > 12);
  CHECK(bytes.substr(0, 8) == "PPOLABCK");
  CHECK(static_cast<unsigned char>(bytes[8]) == 1);  // version 1, little-endian u32
  CHECK(bytes[9] == 0);
  CHECK(bytes[10] == 0);
  CHECK(bytes[11] == 0);
}

TEST_CASE("foreign and damaged checkpoint files are refused with a reason") {
  Checkpoint ck = busy_checkpoint();
  TempFile f("ck_damage.bin");
  checkpoint_save(f.path, ck);
  std::string good = file_bytes(f.path);

  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(checkpoint_load("/nonexistent/dir/x.ckpt"),
                         doctest::Contains("cannot open"), std::runtime_error);
  }
  SUBCASE("wrong magic") {
    std::string bad = good;
    bad[0] = 'Q';
    write_bytes(f.path, bad);
    CHECK_THROWS_WITH_AS(checkpoint_load(f.path), doctest::Contains("not a checkpoint file"),
                         std::runtime_error);
  }
  SUBCASE("unsupported version") {
    std::string bad = good;
    bad[8] = 2;
    write_bytes(f.path, bad);
    CHECK_THROWS_WITH_AS(checkpoint_load(f.path),
                         doctest::Contains("unsupported format version"), std::runtime_error);
  }
  SUBCASE("truncated payload") {
    write_bytes(f.path, good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(checkpoint_load(f.path), std::runtime_error);
  }
  SUBCASE("truncated in the trailing field") {
    write_bytes(f.path, good.substr(0, good.size() - 1));
    CHECK_THROWS_WITH_AS(checkpoint_load(f.path), doctest::Contains("truncated"),
                         std::runtime_error);
  }
}
