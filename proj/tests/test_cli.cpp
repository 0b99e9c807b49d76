#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ppolab/config.hpp"
#include "ppolab/sweep.hpp"

using namespace ppolab;
namespace fs = std::filesystem;

namespace {

// These cases drive the installed binary the way a user would; the path
// arrives through the PPOLAB_BIN environment variable set by the test runner.
std::string binary_path() {
  const char* bin = std::getenv("PPOLAB_BIN");
  REQUIRE(bin != nullptr);
  return bin;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ppolab_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += "'";
  return out;
}

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

CmdResult run_cli(const std::vector<std::string>& args, const TempDir& dir) {
  const std::string out_file = dir.sub("stdout.txt");
  const std::string err_file = dir.sub("stderr.txt");
  std::string cmd = shell_quote(binary_path());
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  cmd += " >" + shell_quote(out_file) + " 2>" + shell_quote(err_file);
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = file_text(out_file);
  r.err = file_text(err_file);
  return r;
}

// Flags for a three-iteration run, small enough that a full train invocation
// costs milliseconds. The environment is the caller's pick.
std::vector<std::string> tiny_train_flags() {
  return {"--budget", "48",
          "--set",  "ppo.rollout_length=8",
          "--set",  "ppo.num_envs=2",
          "--set",  "ppo.num_epochs=1",
          "--set",  "ppo.num_minibatches=1",
          "--set",  "network.hidden=[4]",
          "--set",  "num_intermediate_evals=1",
          "--set",  "eval_episodes_intermediate=2",
          "--set",  "absolute_eval_episodes=4"};
}

std::vector<std::string> with(std::vector<std::string> args, const std::vector<std::string>& more) {
  args.insert(args.end(), more.begin(), more.end());
  return args;
}

std::vector<std::string> chain_train_flags() {
  return with(tiny_train_flags(), {"--env", "chain-mdp"});
}

const std::vector<std::string> kBehaviorFiles = {"events.jsonl", "summary.json",
                                                 "final-params.bin"};

}  // namespace

TEST_CASE("train writes its artifact set and replays from the resolved config") {
  TempDir dir("train");
  const std::string out = dir.sub("run");

  std::vector<std::string> args = {"train", "--seed", "7", "--out", out};
  args = with(args, chain_train_flags());
  const CmdResult first = run_cli(args, dir);
  CHECK(first.exit_code == 0);
  CHECK(first.out.find("run completed") != std::string::npos);

  for (const char* name : {"resolved-config.json", "events.jsonl", "summary.json",
                           "checkpoint.bin", "final-params.bin"})
    CHECK(fs::exists(fs::path(out) / name));

  const json summary = load_json_file(out + "/summary.json");
  CHECK(summary.at("completed").get<bool>());
  CHECK_FALSE(summary.at("nan_aborted").get<bool>());
  CHECK(summary.at("iterations").get<int>() == 3);
  CHECK(summary.at("transitions").get<int>() == 48);
  CHECK(summary.at("absolute_eval").at("returns").size() == 4);

  // three iteration records plus the eval at zero and the final one
  int events = 0;
  std::ifstream in(out + "/events.jsonl");
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++events;
  CHECK(events == 5);

  // the emitted config is the whole run: replaying it reproduces every file
  const std::string replay = dir.sub("replay");
  const CmdResult second =
      run_cli({"train", "--config", out + "/resolved-config.json", "--out", replay}, dir);
  CHECK(second.exit_code == 0);
  for (const char* name : {"resolved-config.json", "events.jsonl", "summary.json",
                           "checkpoint.bin", "final-params.bin"})
    CHECK(file_text(out + "/" + name) == file_text(replay + "/" + name));
}

TEST_CASE("outer variants that collapse to the standard update leave identical artifacts") {
  TempDir dir("reduction");
  const std::string base_out = dir.sub("standard");
  CmdResult base = run_cli(
      with({"train", "--seed", "7", "--outer", "standard", "--out", base_out}, chain_train_flags()),
      dir);
  REQUIRE(base.exit_code == 0);

  const std::vector<std::pair<std::string, std::vector<std::string>>> variants = {
      {"lr-one", {"--outer", "lr", "--sigma", "1.0"}},
      {"nesterov-zero", {"--outer", "nesterov", "--sigma", "1.0", "--mu", "0.0"}},
      {"biased-zero", {"--outer", "biased", "--alpha", "0.0", "--mu", "0.5"}},
  };
  for (const auto& [name, flags] : variants) {
    CAPTURE(name);
    const std::string out = dir.sub(name);
    std::vector<std::string> args = {"train", "--seed", "7", "--out", out};
    args = with(args, chain_train_flags());
    args = with(args, flags);
    const CmdResult r = run_cli(args, dir);
    CHECK(r.exit_code == 0);
    for (const std::string& file : kBehaviorFiles)
      CHECK(file_text(base_out + "/" + file) == file_text(out + "/" + file));
    // the resolved config keeps the configured strategy, it is not rewritten
    CHECK(file_text(base_out + "/resolved-config.json") !=
          file_text(out + "/resolved-config.json"));
  }
}

TEST_CASE("config errors exit with code 2 before the output directory appears") {
  TempDir dir("config_errors");

  const std::vector<std::vector<std::string>> bad = {
      {"train", "--outer", "lr", "--sigma", "0"},
      {"train", "--set", "ppo.num_minibatches=3"},
      {"train", "--set", "no.such.key=1"},
      {"train", "--set", "ppo.num_epochs=1.5"},
      {"train", "--set", "seed"},
  };
  for (const auto& args : bad) {
    CAPTURE(args.back());
    const std::string out = dir.sub("never");
    std::vector<std::string> full = args;
    full = with(full, {"--out", out});
    const CmdResult r = run_cli(full, dir);
    CHECK(r.exit_code == 2);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(out));
  }

  // unknown flags are usage errors with the same contract
  const CmdResult r = run_cli({"train", "--frobnicate"}, dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("a run that diverges numerically exits with the abort code") {
  TempDir dir("abort");
  const std::string out = dir.sub("run");
  std::vector<std::string> args = {"train", "--seed", "3", "--out", out,
                                   "--set", "ppo.reward_scale=1e300"};
  args = with(args, tiny_train_flags());
  args = with(args, {"--env", "cartpole-discrete"});
  const CmdResult r = run_cli(args, dir);
  CHECK(r.exit_code == 3);

  const json summary = load_json_file(out + "/summary.json");
  CHECK(summary.at("nan_aborted").get<bool>());
  CHECK_FALSE(summary.at("completed").get<bool>());
  CHECK(summary.at("absolute_eval").is_null());
  CHECK(fs::exists(fs::path(out) / "events.jsonl"));
}

TEST_CASE("presets emits the documented files and lists alternatives for unknown names") {
  TempDir dir("presets");

  CmdResult r = run_cli({"presets", "ant-baseline", "--out", dir.sub("p")}, dir);
  CHECK(r.exit_code == 0);
  const json ant = load_json_file(dir.sub("p") + "/ant-baseline.json");
  CHECK(ant.at("ppo").at("actor_lr").get<double>() == 3.0e-4);
  CHECK(ant.at("ppo").at("clip_epsilon").get<double>() == 0.21);

  r = run_cli({"presets", "outer-lr-grid", "--out", dir.sub("p")}, dir);
  CHECK(r.exit_code == 0);
  const json grid = load_json_file(dir.sub("p") + "/outer-lr-grid.json");
  CHECK(grid.at("axes").at("outer.sigma").size() == 40);
  CHECK(grid.at("axes").at("outer.sigma")[0].get<double>() == 0.1);

  r = run_cli({"presets", "not-a-preset"}, dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("available:") != std::string::npos);

  r = run_cli({"presets"}, dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("cartpole-small-clip\n") != std::string::npos);
  int names = 0;
  for (char c : r.out)
    if (c == '\n') ++names;
  CHECK(names == 65);
}

TEST_CASE("sweep resumes an interrupted log byte for byte and exports tables") {
  TempDir dir("sweep");

  RunConfig base;
  base.env = "chain-mdp";
  base.seed = 11;
  base.network.hidden = {4};
  base.ppo.rollout_length = 8;
  base.ppo.num_envs = 2;
  base.ppo.num_epochs = 1;
  base.ppo.num_minibatches = 1;
  base.total_transitions = 48;
  base.num_intermediate_evals = 1;
  base.eval_episodes_intermediate = 2;
  base.absolute_eval_episodes = 4;

  SweepSpec spec;
  spec.base = base;
  spec.axes = {{"outer.sigma", {0.5, 1.0}}};
  spec.seeds_per_trial = 2;
  spec.seed = 21;
  const std::string spec_path = dir.sub("spec.json");
  save_json(spec_path, sweep_spec_to_json(spec));

  const std::string out = dir.sub("sweep");
  CmdResult r = run_cli({"sweep", "--config", spec_path, "--out", out}, dir);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("trial 2/2") != std::string::npos);

  const std::string log = out + "/sweep.jsonl";
  const std::string finished = file_text(log);

  const json summary = load_json_file(out + "/sweep-summary.json");
  CHECK(summary.at("trials").get<int>() == 2);
  CHECK(summary.at("done").get<int>() == 2);
  CHECK(summary.at("best").at("trial").is_number());
  CHECK(fs::exists(fs::path(out) / "best-config.json"));

  // cut the log mid-sweep; the rerun must reproduce the finished file exactly
  std::string prefix;
  std::size_t newlines = 0;
  for (char c : finished) {
    prefix += c;
    if (c == '\n' && ++newlines == 3) break;
  }
  {
    std::ofstream cut(log, std::ios::binary | std::ios::trunc);
    cut << prefix;
  }
  r = run_cli({"sweep", "--config", spec_path, "--out", out}, dir);
  CHECK(r.exit_code == 0);
  CHECK(file_text(log) == finished);

  r = run_cli({"sweep", "export", "--log", log, "--out", out, "--format", "csv"}, dir);
  CHECK(r.exit_code == 0);
  const std::string csv = file_text(out + "/sweep.csv");
  CHECK(csv.rfind("trial,outer.sigma,agent,seed,completed,nan_aborted,", 0) == 0);

  r = run_cli({"sweep", "export", "--log", log, "--out", out, "--format", "json"}, dir);
  CHECK(r.exit_code == 0);
  const json table = load_json_file(out + "/sweep-trials.json");
  CHECK(table.at("trials").size() == 2);
  CHECK(table.at("trials")[0].at("seeds").size() == 2);

  // a sweep against a different spec must refuse the existing log
  SweepSpec other = spec;
  other.seed = 22;
  const std::string other_path = dir.sub("other.json");
  save_json(other_path, sweep_spec_to_json(other));
  r = run_cli({"sweep", "--config", other_path, "--out", out}, dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("different spec") != std::string::npos);
}

TEST_CASE("metrics and the plots drawn from it emit the same numbers") {
  TempDir dir("metrics");

  {
    std::ofstream scores(dir.sub("scores.jsonl"));
    for (const auto& [method, offset] : {std::pair<const char*, double>{"standard", 0.0},
                                         std::pair<const char*, double>{"lr", 0.3}})
      for (const char* task : {"alpha", "beta"})
        for (int seed = 0; seed < 4; ++seed) {
          json rec;
          rec["method"] = method;
          rec["task"] = task;
          rec["seed"] = seed;
          rec["return"] = 1.0 + 0.5 * seed + offset;
          scores << rec.dump() << "\n";
        }
  }
  {
    std::ofstream norm(dir.sub("norm.csv"));
    norm << "task,min,max\nalpha,0,4\nbeta,0,4\n";
  }

  const std::string out = dir.sub("m");
  CmdResult r = run_cli({"metrics", dir.sub("scores.jsonl"), "--normalization", dir.sub("norm.csv"),
                         "--baseline", "standard", "--out", out},
                        dir);
  CHECK(r.exit_code == 0);
  const json doc = load_json_file(out + "/metrics.json");
  CHECK(doc.at("methods").size() == 2);
  REQUIRE(doc.at("poi").size() == 1);
  CHECK(doc.at("poi")[0].at("comparison").get<std::string>() == "lr vs standard");

  r = run_cli({"plot", "poi", "--metrics", out + "/metrics.json", "--out", out}, dir);
  CHECK(r.exit_code == 0);
  CHECK(file_text(out + "/poi.svg").find("</svg>") != std::string::npos);
  // the sidecar parses back to exactly the value the metrics report holds
  const std::string poi_csv = file_text(out + "/poi.csv");
  const std::size_t line_start = poi_csv.find('\n') + 1;
  const std::size_t value_start = poi_csv.find(',', line_start) + 1;
  CHECK(std::strtod(poi_csv.c_str() + value_start, nullptr) ==
        doc.at("poi")[0].at("value").get<double>());

  r = run_cli({"plot", "aggregates", "--metrics", out + "/metrics.json", "--out", out}, dir);
  CHECK(r.exit_code == 0);
  const std::string agg_csv = file_text(out + "/aggregates.csv");
  CHECK(agg_csv.rfind("method,metric,value,ci_lo,ci_hi\n", 0) == 0);
  const std::size_t med_pos = agg_csv.find("standard,median,");
  REQUIRE(med_pos != std::string::npos);
  CHECK(std::strtod(agg_csv.c_str() + med_pos + 16, nullptr) ==
        doc.at("methods").at("standard").at("median").at("value").get<double>());

  r = run_cli({"plot", "profile", "--scores", dir.sub("scores.jsonl"), "--normalization",
               dir.sub("norm.csv"), "--points", "11", "--out", out},
              dir);
  CHECK(r.exit_code == 0);
  CHECK(file_text(out + "/profile.csv").find("standard,0.5,") != std::string::npos);

  // empty inputs are config errors, not empty figures
  { std::ofstream empty(dir.sub("empty.jsonl")); }
  r = run_cli({"metrics", dir.sub("empty.jsonl"), "--normalization", dir.sub("norm.csv")}, dir);
  CHECK(r.exit_code == 2);
  r = run_cli({"plot", "aggregates", "--metrics", dir.sub("norm.csv"), "--out", out}, dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("efficiency and sensitivity plots read the artifacts other commands wrote") {
  TempDir dir("plots");

  // two runs per strategy so the efficiency band has a spread
  std::vector<std::string> run_dirs;
  for (const auto& [name, flags] :
       {std::pair<std::string, std::vector<std::string>>{"s", {"--outer", "standard"}},
        std::pair<std::string, std::vector<std::string>>{"l", {"--outer", "lr", "--sigma", "1.5"}}})
    for (int seed : {5, 6}) {
      const std::string out = dir.sub(name + std::to_string(seed));
      std::vector<std::string> args = {"train", "--seed", std::to_string(seed), "--out", out};
      args = with(args, chain_train_flags());
      args = with(args, flags);
      REQUIRE(run_cli(args, dir).exit_code == 0);
      run_dirs.push_back(out);
    }
  {
    std::ofstream norm(dir.sub("norm.csv"));
    norm << "task,min,max\nchain-mdp,0,1\n";
  }
  const std::string out = dir.sub("fig");
  CmdResult r = run_cli({"plot", "efficiency", "--runs", run_dirs[0], "--runs", run_dirs[1],
                         "--runs", run_dirs[2], "--runs", run_dirs[3], "--normalization",
                         dir.sub("norm.csv"), "--out", out},
                        dir);
  CHECK(r.exit_code == 0);
  const std::string csv = file_text(out + "/efficiency.csv");
  CHECK(csv.find("standard,0,") != std::string::npos);
  CHECK(csv.find("lr sigma=1.5,0,") != std::string::npos);

  // a sweep supplies the sensitivity figures
  RunConfig base;
  base.env = "chain-mdp";
  base.seed = 11;
  base.network.hidden = {4};
  base.ppo.rollout_length = 8;
  base.ppo.num_envs = 2;
  base.ppo.num_epochs = 1;
  base.ppo.num_minibatches = 1;
  base.total_transitions = 48;
  base.num_intermediate_evals = 1;
  base.eval_episodes_intermediate = 2;
  base.absolute_eval_episodes = 4;
  SweepSpec spec;
  spec.base = base;
  spec.axes = {{"outer.sigma", {0.5, 1.0}}};
  spec.seeds_per_trial = 2;
  spec.seed = 21;
  save_json(dir.sub("spec.json"), sweep_spec_to_json(spec));
  REQUIRE(run_cli({"sweep", "--config", dir.sub("spec.json"), "--out", dir.sub("sw")}, dir)
              .exit_code == 0);

  r = run_cli({"plot", "sensitivity-1d", "--sweep", dir.sub("sw") + "/sweep.jsonl", "--out", out},
              dir);
  CHECK(r.exit_code == 0);
  CHECK(file_text(out + "/sensitivity-1d.csv").rfind("outer.sigma,mean,stderr\n", 0) == 0);
  CHECK(file_text(out + "/sensitivity-1d.svg").find("</svg>") != std::string::npos);

  // one swept axis cannot make a heatmap
  r = run_cli({"plot", "sensitivity-2d", "--sweep", dir.sub("sw") + "/sweep.jsonl", "--out", out},
              dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("exactly two axes") != std::string::npos);
}

TEST_CASE("eval replays a checkpointed policy deterministically") {
  TempDir dir("eval");
  const std::string run = dir.sub("run");
  std::vector<std::string> args = {"train", "--seed", "7", "--out", run};
  args = with(args, chain_train_flags());
  REQUIRE(run_cli(args, dir).exit_code == 0);

  const std::string config = run + "/resolved-config.json";
  const std::string ck = run + "/checkpoint.bin";

  CmdResult a = run_cli({"eval", "--config", config, "--checkpoint", ck, "--episodes", "6",
                         "--seed", "99", "--out", dir.sub("e1")},
                        dir);
  CmdResult b = run_cli({"eval", "--config", config, "--checkpoint", ck, "--episodes", "6",
                         "--seed", "99", "--out", dir.sub("e2")},
                        dir);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(file_text(dir.sub("e1") + "/eval.json") == file_text(dir.sub("e2") + "/eval.json"));
  const json doc = load_json_file(dir.sub("e1") + "/eval.json");
  CHECK(doc.at("returns").size() == 6);
  CHECK(doc.at("policy").get<std::string>() == "final");

  CmdResult best = run_cli(
      {"eval", "--config", config, "--checkpoint", ck, "--best", "--out", dir.sub("e3")}, dir);
  CHECK(best.exit_code == 0);
  CHECK(load_json_file(dir.sub("e3") + "/eval.json").at("policy").get<std::string>() == "best");

  // pointing the config at a different environment cannot evaluate this checkpoint
  CmdResult wrong = run_cli({"eval", "--config", config, "--set", "env=cartpole-discrete",
                             "--checkpoint", ck, "--out", dir.sub("e4")},
                            dir);
  CHECK(wrong.exit_code == 2);
  CHECK(wrong.err.find("trained on") != std::string::npos);
}
