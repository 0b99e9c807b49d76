#include <CLI11.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppolab/driver.hpp"
#include "ppolab/metrics.hpp"
#include "ppolab/plots.hpp"
#include "ppolab/presets.hpp"
#include "ppolab/sweep.hpp"

namespace fs = std::filesystem;

namespace {

using namespace ppolab;

// Stable exit contract for scripts driving the binary.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// One write per line so interleaved progress from worker threads stays whole.
void emit(const std::string& line) {
  std::string buf = line;
  buf.push_back('\n');
  std::fwrite(buf.data(), 1, buf.size(), stdout);
  std::fflush(stdout);
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += " ";
    out += p;
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// Raw little-endian dump of a parameter vector: u64 count, then one IEEE-754
// bit pattern per value. Exact by construction, and strategy-agnostic where a
// checkpoint is not (it carries the outer optimizer state too).
void write_params_file(const std::string& path, const ParamVector& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  auto u64 = [&](std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  };
  u64(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    u64(std::bit_cast<std::uint64_t>(params.data()[static_cast<Eigen::Index>(i)]));
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---- shared config assembly -------------------------------------------------

// Flags that spell common run-config overrides without dotted paths. They are
// applied after --set, so the most specific spelling wins.
struct RunFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string env;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::string outer;
  std::optional<double> sigma;
  std::optional<double> mu;
  std::optional<double> alpha;

  std::vector<std::string> overrides() const {
    std::vector<std::string> v;
    if (!env.empty()) v.push_back("env=" + env);
    if (seed) v.push_back("seed=" + std::to_string(*seed));
    if (budget) v.push_back("total_transitions=" + std::to_string(*budget));
    if (!outer.empty()) v.push_back("outer.strategy=" + outer);
    if (sigma) v.push_back("outer.sigma=" + g17(*sigma));
    if (mu) v.push_back("outer.mu=" + g17(*mu));
    if (alpha) v.push_back("outer.alpha=" + g17(*alpha));
    return v;
  }
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "Run config JSON; defaults are used without it")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", f.sets, "Dotted-path override, e.g. --set ppo.clip_epsilon=0.1");
  cmd->add_option("--env,--envs", f.env, "Environment id");
  cmd->add_option("--seed", f.seed, "Training seed");
  cmd->add_option("--budget", f.budget, "Total environment transitions");
  cmd->add_option("--outer", f.outer, "Outer update strategy: standard, lr, nesterov, biased");
  cmd->add_option("--sigma", f.sigma, "Outer learning rate");
  cmd->add_option("--mu", f.mu, "Outer momentum decay");
  cmd->add_option("--alpha", f.alpha, "Initialization bias scale");
}

// Defaults, then the config file, then overrides; the result is reparsed
// strictly and validated, so every error surfaces before any work starts.
// The returned tree is fully resolved: feeding it back through --config
// reproduces the run bit for bit.
json resolve_run_tree(const std::string& config_path, const std::vector<std::string>& sets,
                      const std::vector<std::string>& flag_sets) {
  json tree = config_path.empty() ? run_config_to_json(RunConfig{})
                                  : run_config_to_json(load_run_config(config_path));
  apply_overrides(tree, sets);
  apply_overrides(tree, flag_sets);
  const RunConfig cfg = run_config_from_json(tree);
  validate(cfg);
  return run_config_to_json(cfg);
}

NormalizationTable resolve_normalization(const std::string& source) {
  if (source == "reference") return reference_normalization_table();
  return NormalizationTable::from_csv(source);
}

std::string strategy_label(const OuterConfig& o) {
  switch (o.strategy) {
    case OuterStrategy::standard:
      return "standard";
    case OuterStrategy::outer_lr:
      return "lr sigma=" + g6(o.sigma);
    case OuterStrategy::nesterov:
      return "nesterov sigma=" + g6(o.sigma) + " mu=" + g6(o.mu);
    case OuterStrategy::biased_init:
      return "biased alpha=" + g6(o.alpha) + " mu=" + g6(o.mu);
  }
  return "unknown";
}

// ---- train ------------------------------------------------------------------

struct TrainCli {
  RunFlags run;
  std::string out_dir = ".";
};

int cmd_train(const TrainCli& t) {
  const json resolved = resolve_run_tree(t.run.config_path, t.run.sets, t.run.overrides());
  const RunConfig cfg = run_config_from_json(resolved);

  fs::create_directories(t.out_dir);
  const fs::path out(t.out_dir);
  save_json((out / "resolved-config.json").string(), resolved);

  const std::string events_path = (out / "events.jsonl").string();
  std::ofstream events(events_path, std::ios::binary);
  if (!events) throw std::runtime_error("cannot write '" + events_path + "'");

  TrainingRun run(cfg);
  run.on_eval = [&](const EvalPoint& p) {
    json rec;
    rec["kind"] = "eval";
    rec["index"] = p.index;
    rec["transitions"] = p.transitions;
    rec["mean_return"] = p.mean_return;
    events << rec.dump() << '\n';
    events.flush();
    emit("eval " + std::to_string(p.index) + "/" + std::to_string(cfg.num_intermediate_evals) +
         " transitions=" + std::to_string(p.transitions) + " mean=" + g6(p.mean_return));
  };
  run.on_iteration = [&](const IterationDiag& d) {
    json rec;
    rec["kind"] = "iteration";
    rec["iteration"] = d.iteration;
    rec["transitions"] = d.transitions;
    rec["outer_grad_norm"] = d.outer_grad_norm;
    rec["momentum_effect_norm"] = d.momentum_effect_norm;
    rec["policy_loss"] = d.policy_loss;
    rec["value_loss"] = d.value_loss;
    rec["clip_fraction"] = d.clip_fraction;
    rec["mean_ratio"] = d.mean_ratio;
    rec["active_fraction"] = d.active_fraction;
    rec["entropy"] = d.entropy;
    events << rec.dump() << '\n';
    events.flush();
  };

  while (run.step()) {
  }
  const RunResult res = run.finish();
  if (!events) throw std::runtime_error("write failed for '" + events_path + "'");
  events.close();

  // The snapshot is taken after finish() so it carries the best policy seen
  // across every evaluation, including the final ones.
  checkpoint_save((out / "checkpoint.bin").string(), run.snapshot());
  write_params_file((out / "final-params.bin").string(), res.final_theta);

  json summary;
  summary["env"] = cfg.env;
  summary["completed"] = res.completed;
  summary["nan_aborted"] = res.nan_aborted;
  summary["iterations"] = res.iterations_done;
  summary["transitions"] = res.transitions_done;
  if (res.eval_points.empty())
    summary["final_eval_mean"] = nullptr;
  else
    summary["final_eval_mean"] = res.eval_points.back().mean_return;
  summary["best_eval_mean"] = res.best_mean;
  summary["best_eval_index"] = res.best_eval_index;
  if (res.completed) {
    json abs;
    abs["episodes"] = res.absolute_returns.size();
    abs["mean"] = res.absolute_mean;
    abs["stderr"] = res.absolute_stderr;
    abs["returns"] = res.absolute_returns;
    summary["absolute_eval"] = abs;
  } else {
    summary["absolute_eval"] = nullptr;
  }
  save_json((out / "summary.json").string(), summary);

  if (res.nan_aborted) {
    emit("run aborted on a non-finite update after " + std::to_string(res.iterations_done) +
         " iterations; artifacts in " + t.out_dir);
    return kExitNumerical;
  }
  emit("run completed: iterations=" + std::to_string(res.iterations_done) +
       " transitions=" + std::to_string(res.transitions_done) + " best=" + g6(res.best_mean) +
       " absolute=" + g6(res.absolute_mean));
  return kExitOk;
}

// ---- eval -------------------------------------------------------------------

struct EvalCli {
  std::string config_path;
  std::vector<std::string> sets;
  std::string checkpoint_path;
  int episodes = 0;  // 0: the config's absolute evaluation count
  std::optional<std::uint64_t> eval_seed;
  bool use_best = false;
  std::string out_dir = ".";
};

int cmd_eval(const EvalCli& e) {
  const json resolved = resolve_run_tree(e.config_path, e.sets, {});
  const RunConfig cfg = run_config_from_json(resolved);
  const Checkpoint ck = checkpoint_load(e.checkpoint_path);
  if (ck.env_id != cfg.env)
    throw ConfigError("checkpoint was trained on '" + ck.env_id + "' but the config says '" +
                      cfg.env + "'");
  const ActorCritic net = build_network(cfg);
  if (!(ck.theta.layout() == *net.layout))
    throw ConfigError("checkpoint parameters do not fit the configured network");

  const ParamVector* theta = &ck.theta;
  if (e.use_best) {
    if (ck.best_theta.size() == 0)
      throw ConfigError("checkpoint holds no evaluated policy yet; drop --best");
    theta = &ck.best_theta;
  }

  const int episodes = e.episodes > 0 ? e.episodes : cfg.absolute_eval_episodes;
  const std::uint64_t seed = e.eval_seed ? *e.eval_seed : cfg.seed;
  const std::vector<double> returns = evaluate_policy(net, *theta, cfg.env, episodes, seed);

  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  const double stderr_value =
      returns.size() > 1
          ? std::sqrt(var / static_cast<double>(returns.size() - 1) /
                      static_cast<double>(returns.size()))
          : 0.0;

  fs::create_directories(e.out_dir);
  const fs::path out(e.out_dir);
  save_json((out / "resolved-config.json").string(), resolved);
  json doc;
  doc["env"] = cfg.env;
  doc["checkpoint"] = e.checkpoint_path;
  doc["policy"] = e.use_best ? "best" : "final";
  doc["episodes"] = episodes;
  doc["eval_seed"] = seed;
  doc["mean"] = mean;
  doc["stderr"] = stderr_value;
  doc["returns"] = returns;
  save_json((out / "eval.json").string(), doc);

  emit("evaluated " + std::string(e.use_best ? "best" : "final") + " policy on " + cfg.env + ": " +
       std::to_string(episodes) + " episodes, mean=" + g6(mean) + " stderr=" + g6(stderr_value));
  return kExitOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepCli {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> budget;
  int workers = 1;
  std::string out_dir = ".";
};

struct SweepExportCli {
  std::string log_path;
  std::string format = "csv";
  std::string out_dir = ".";
};

json resolve_sweep_tree(const SweepCli& s) {
  if (s.config_path.empty()) throw ConfigError("sweep needs --config with a sweep spec");
  json tree = sweep_spec_to_json(load_sweep_spec(s.config_path));
  apply_overrides(tree, s.sets);
  std::vector<std::string> flags;
  if (s.seed) flags.push_back("seed=" + std::to_string(*s.seed));
  if (s.budget) flags.push_back("trial_budget=" + std::to_string(*s.budget));
  apply_overrides(tree, flags);
  const SweepSpec spec = sweep_spec_from_json(tree);
  validate(spec);
  return sweep_spec_to_json(spec);
}

int cmd_sweep_run(const SweepCli& s) {
  const json resolved = resolve_sweep_tree(s);
  const SweepSpec spec = sweep_spec_from_json(resolved);

  fs::create_directories(s.out_dir);
  const fs::path out(s.out_dir);
  save_json((out / "resolved-config.json").string(), resolved);

  const int total = sweep_trial_count(spec);
  const SweepResult result =
      run_sweep(spec, (out / "sweep.jsonl").string(), s.workers, [&](const SweepTrial& t) {
        std::string line = "trial " + std::to_string(t.id + 1) + "/" + std::to_string(total);
        for (const auto& [path, value] : t.params) line += " " + path + "=" + g6(value);
        line += t.done ? " objective=" + g6(t.objective) : " all seeds aborted";
        emit(line);
      });

  int done = 0;
  for (const SweepTrial& t : result.trials)
    if (t.done) ++done;

  json summary;
  summary["trials"] = result.trials.size();
  summary["done"] = done;
  summary["aborted"] = result.trials.size() - static_cast<std::size_t>(done);
  summary["objective"] = sweep_objective_name(spec.objective);
  if (done > 0) {
    const SweepTrial& best = best_trial(result, spec.objective);
    json b;
    b["trial"] = best.id;
    json params = json::object();
    for (const auto& [path, value] : best.params) params[path] = value;
    b["params"] = params;
    b["objective"] = best.objective;
    summary["best"] = b;
    save_json((out / "best-config.json").string(),
              run_config_to_json(trial_config(spec, best.id)));
  } else {
    summary["best"] = nullptr;
  }
  save_json((out / "sweep-summary.json").string(), summary);

  emit("sweep finished: " + std::to_string(done) + "/" + std::to_string(total) +
       " trials completed; artifacts in " + s.out_dir);
  return kExitOk;
}

int cmd_sweep_export(const SweepExportCli& s) {
  if (s.log_path.empty()) throw ConfigError("sweep export needs --log with a sweep log");
  const SweepResult result = load_sweep(s.log_path);
  fs::create_directories(s.out_dir);
  const fs::path out(s.out_dir);

  if (s.format == "csv") {
    const std::string path = (out / "sweep.csv").string();
    write_sweep_csv(result, path);
    emit("wrote " + path);
    return kExitOk;
  }

  json doc;
  doc["spec"] = sweep_spec_to_json(result.spec);
  json trials = json::array();
  for (const SweepTrial& t : result.trials) {
    json row;
    row["trial"] = t.id;
    json params = json::object();
    for (const auto& [path, value] : t.params) params[path] = value;
    row["params"] = params;
    row["status"] = t.done ? "done" : "nan";
    if (t.done)
      row["objective"] = t.objective;
    else
      row["objective"] = nullptr;
    json seeds = json::array();
    for (const SeedOutcome& o : t.seeds) {
      json rec;
      rec["agent"] = o.agent;
      rec["seed"] = o.seed;
      rec["completed"] = o.completed;
      rec["nan_aborted"] = o.nan_aborted;
      rec["final_eval_mean"] = o.final_eval_mean;
      rec["best_eval_mean"] = o.best_eval_mean;
      seeds.push_back(rec);
    }
    row["seeds"] = seeds;
    trials.push_back(row);
  }
  doc["trials"] = trials;
  const std::string path = (out / "sweep-trials.json").string();
  save_json(path, doc);
  emit("wrote " + path);
  return kExitOk;
}

// ---- metrics ------------------------------------------------------------------

struct MetricsCli {
  std::vector<std::string> score_files;
  std::string normalization;
  std::string baseline;
  std::string out_dir = ".";
};

int cmd_metrics(const MetricsCli& m) {
  std::vector<ScoreRecord> records;
  for (const std::string& file : m.score_files) {
    const std::vector<ScoreRecord> part = load_score_records(file);
    records.insert(records.end(), part.begin(), part.end());
  }
  const std::vector<std::string> methods = record_methods(records);
  if (methods.empty()) throw ConfigError("no score records in the input files");

  const std::string baseline = m.baseline.empty() ? methods.front() : m.baseline;
  if (std::find(methods.begin(), methods.end(), baseline) == methods.end())
    throw ConfigError("baseline '" + baseline + "' has no records; methods present: " +
                      join(methods));

  const NormalizationTable table = resolve_normalization(m.normalization);
  std::vector<std::pair<std::string, ScoreMatrix>> matrices;
  for (const std::string& method : methods)
    matrices.emplace_back(method, normalize(score_matrix_from_records(records, method), table));

  json doc;
  doc["kind"] = "metrics";
  doc["baseline"] = baseline;
  json per = json::object();
  for (const auto& [method, matrix] : matrices)
    per[method] = aggregate_report_to_json(aggregate_point_estimates(matrix));
  doc["methods"] = per;

  const ScoreMatrix* base = nullptr;
  for (const auto& [method, matrix] : matrices)
    if (method == baseline) base = &matrix;
  json poi = json::array();
  for (const auto& [method, matrix] : matrices) {
    if (method == baseline) continue;
    const PointEstimate p = probability_of_improvement(matrix, *base);
    json row;
    row["comparison"] = method + " vs " + baseline;
    row["value"] = p.value;
    row["ci_lo"] = p.ci_lo;
    row["ci_hi"] = p.ci_hi;
    poi.push_back(row);
  }
  doc["poi"] = poi;

  fs::create_directories(m.out_dir);
  const fs::path out(m.out_dir);
  json invocation;
  invocation["command"] = "metrics";
  invocation["scores"] = m.score_files;
  invocation["normalization"] = m.normalization;
  invocation["baseline"] = baseline;
  save_json((out / "resolved-config.json").string(), invocation);
  save_json((out / "metrics.json").string(), doc);

  emit("aggregated " + std::to_string(records.size()) + " records over " +
       std::to_string(methods.size()) + " methods; wrote " + (out / "metrics.json").string());
  return kExitOk;
}

// ---- plot ---------------------------------------------------------------------

struct PlotCli {
  std::string kind;
  std::string metrics_path;
  std::string sweep_log;
  std::vector<std::string> score_files;
  std::vector<std::string> run_dirs;
  std::string normalization;
  std::string axis_x;
  std::string axis_y;
  std::string range_text;
  int profile_points = 101;
  std::string out_dir = ".";
};

PointEstimate point_from_json(const json& j) {
  PointEstimate p;
  p.value = j.at("value").get<double>();
  p.ci_lo = j.at("ci_lo").get<double>();
  p.ci_hi = j.at("ci_hi").get<double>();
  return p;
}

json load_metrics_document(const std::string& path) {
  if (path.empty()) throw ConfigError("this plot kind needs --metrics");
  const json doc = load_json_file(path);
  if (!doc.is_object() || doc.value("kind", "") != "metrics")
    throw ConfigError("'" + path + "' is not a metrics report");
  return doc;
}

std::optional<std::pair<double, double>> parse_range(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double lo = 0.0, hi = 0.0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf%n", &lo, &hi, &consumed) != 2 ||
      consumed != static_cast<int>(text.size()))
    throw ConfigError("--range wants min,max (e.g. 0,500), got '" + text + "'");
  return std::make_pair(lo, hi);
}

std::vector<std::string> swept_paths(const SweepSpec& spec) {
  std::vector<std::string> paths;
  for (const auto& [path, values] : spec.axes) paths.push_back(path);
  for (const SweepRange& r : spec.ranges) paths.push_back(r.path);
  return paths;
}

// One training output directory: the run's outer settings label the curve,
// the eval records supply the points.
struct LoadedRun {
  std::string label;
  RunCurve curve;
  std::vector<double> transitions;
};

LoadedRun load_run_dir(const std::string& dir) {
  const fs::path base(dir);
  const RunConfig cfg = load_run_config((base / "resolved-config.json").string());
  const std::string events_path = (base / "events.jsonl").string();
  std::ifstream in(events_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + events_path + "'");

  LoadedRun run;
  run.label = strategy_label(cfg.outer);
  run.curve.task = cfg.env;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
      throw ConfigError("'" + events_path + "' line " + std::to_string(line_no) +
                        " is not an event record");
    if (rec.value("kind", "") != "eval") continue;
    run.curve.returns.push_back(rec.at("mean_return").get<double>());
    run.transitions.push_back(rec.at("transitions").get<double>());
  }
  if (run.curve.returns.empty())
    throw ConfigError("no evaluation records in '" + events_path + "'");
  return run;
}

int cmd_plot(const PlotCli& p) {
  fs::create_directories(p.out_dir);
  const fs::path out(p.out_dir);
  const auto svg_path = (out / (p.kind + ".svg")).string();
  const auto csv_path = (out / (p.kind + ".csv")).string();

  json invocation;
  invocation["command"] = "plot";
  invocation["kind"] = p.kind;
  if (!p.metrics_path.empty()) invocation["metrics"] = p.metrics_path;
  if (!p.sweep_log.empty()) invocation["sweep"] = p.sweep_log;
  if (!p.score_files.empty()) invocation["scores"] = p.score_files;
  if (!p.run_dirs.empty()) invocation["runs"] = p.run_dirs;
  if (!p.normalization.empty()) invocation["normalization"] = p.normalization;
  if (!p.axis_x.empty()) invocation["axis"] = p.axis_x;
  if (!p.axis_y.empty()) invocation["axis_y"] = p.axis_y;
  if (!p.range_text.empty()) invocation["range"] = p.range_text;

  if (p.kind == "aggregates") {
    const json doc = load_metrics_document(p.metrics_path);
    std::vector<std::pair<std::string, AggregateReport>> reports;
    for (const auto& [method, rep] : doc.at("methods").items()) {
      AggregateReport r;
      r.median = point_from_json(rep.at("median"));
      r.iqm = point_from_json(rep.at("iqm"));
      r.mean = point_from_json(rep.at("mean"));
      r.optimality_gap = point_from_json(rep.at("optimality_gap"));
      reports.emplace_back(method, r);
    }
    write_text_file(svg_path, render_aggregates_svg(reports));
    write_aggregate_csv(csv_path, reports);
  } else if (p.kind == "poi") {
    const json doc = load_metrics_document(p.metrics_path);
    std::vector<std::pair<std::string, PointEstimate>> comparisons;
    for (const json& row : doc.at("poi"))
      comparisons.emplace_back(row.at("comparison").get<std::string>(), point_from_json(row));
    write_text_file(svg_path, render_poi_svg(comparisons));
    write_poi_csv(comparisons, csv_path);
  } else if (p.kind == "profile") {
    if (p.score_files.empty()) throw ConfigError("plot profile needs --scores");
    if (p.normalization.empty()) throw ConfigError("plot profile needs --normalization");
    std::vector<ScoreRecord> records;
    for (const std::string& file : p.score_files) {
      const std::vector<ScoreRecord> part = load_score_records(file);
      records.insert(records.end(), part.begin(), part.end());
    }
    const std::vector<std::string> methods = record_methods(records);
    if (methods.empty()) throw ConfigError("no score records in the input files");
    const NormalizationTable table = resolve_normalization(p.normalization);
    std::vector<double> thresholds;
    for (int i = 0; i < p.profile_points; ++i)
      thresholds.push_back(static_cast<double>(i) / static_cast<double>(p.profile_points - 1));
    std::vector<std::pair<std::string, ProfileCurve>> curves;
    for (const std::string& method : methods) {
      const ScoreMatrix mat = normalize(score_matrix_from_records(records, method), table);
      curves.emplace_back(method, performance_profile(mat, thresholds));
    }
    write_text_file(svg_path, render_profile_svg(curves));
    write_profile_csv(curves, csv_path);
  } else if (p.kind == "efficiency") {
    if (p.run_dirs.empty()) throw ConfigError("plot efficiency needs --runs");
    if (p.normalization.empty()) throw ConfigError("plot efficiency needs --normalization");
    const NormalizationTable table = resolve_normalization(p.normalization);
    std::vector<std::string> order;
    std::map<std::string, std::vector<LoadedRun>> groups;
    for (const std::string& dir : p.run_dirs) {
      LoadedRun run = load_run_dir(dir);
      if (groups.find(run.label) == groups.end()) order.push_back(run.label);
      groups[run.label].push_back(std::move(run));
    }
    std::vector<LabeledEfficiencyCurve> curves;
    for (const std::string& label : order) {
      const std::vector<LoadedRun>& runs = groups[label];
      for (const LoadedRun& run : runs)
        if (run.transitions != runs.front().transitions)
          throw ConfigError("runs labeled '" + label + "' disagree on their evaluation schedule");
      std::vector<RunCurve> run_curves;
      for (const LoadedRun& run : runs) run_curves.push_back(run.curve);
      LabeledEfficiencyCurve curve;
      curve.label = label;
      curve.transitions = runs.front().transitions;
      curve.curve = sample_efficiency_curve(run_curves, table);
      curves.push_back(std::move(curve));
    }
    write_text_file(svg_path, render_efficiency_svg(curves));
    write_efficiency_csv(curves, csv_path);
  } else if (p.kind == "sensitivity-1d" || p.kind == "sensitivity-2d") {
    if (p.sweep_log.empty()) throw ConfigError("sensitivity plots need --sweep with a sweep log");
    const SweepResult result = load_sweep(p.sweep_log);
    const std::vector<std::string> paths = swept_paths(result.spec);
    const auto range = parse_range(p.range_text);
    const std::pair<double, double>* range_ptr = range ? &*range : nullptr;
    std::string y_label = sweep_objective_name(result.spec.objective);
    if (range) y_label += " (normalized)";

    if (p.kind == "sensitivity-1d") {
      std::string axis = p.axis_x;
      if (axis.empty()) {
        if (paths.size() != 1)
          throw ConfigError("sweep has several axes (" + join(paths) + "); pick one with --axis");
        axis = paths.front();
      }
      const SensitivityCurve curve = sensitivity_curve(result, axis, range_ptr);
      write_text_file(svg_path, render_sensitivity_curve_svg(curve, y_label));
      write_sensitivity_curve_csv(curve, csv_path);
    } else {
      std::string ax = p.axis_x, ay = p.axis_y;
      if (ax.empty() && ay.empty()) {
        if (paths.size() != 2)
          throw ConfigError("sweep does not have exactly two axes (" + join(paths) +
                            "); pick them with --axis and --axis-y");
        ax = paths[0];
        ay = paths[1];
      }
      if (ax.empty() || ay.empty())
        throw ConfigError("sensitivity-2d needs both --axis and --axis-y");
      const SensitivitySurface surface = sensitivity_surface(result, ax, ay, range_ptr);
      write_text_file(svg_path, render_sensitivity_surface_svg(surface, y_label));
      write_sensitivity_surface_csv(surface, csv_path);
    }
  } else {
    throw ConfigError("unknown plot kind '" + p.kind + "'");
  }

  save_json((out / "resolved-config.json").string(), invocation);
  emit("wrote " + svg_path + " and " + csv_path);
  return kExitOk;
}

// ---- presets ------------------------------------------------------------------

struct PresetsCli {
  std::string name;
  std::string out_dir = ".";
  bool list = false;
};

int cmd_presets(const PresetsCli& p) {
  if (p.list || p.name.empty()) {
    for (const std::string& name : all_preset_names()) emit(name);
    return kExitOk;
  }
  const json doc = preset_document(p.name);
  fs::create_directories(p.out_dir);
  const std::string path = (fs::path(p.out_dir) / (p.name + ".json")).string();
  save_json(path, doc);
  emit("wrote " + path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training laboratory for PPO with a decoupled outer update step"};
  app.require_subcommand(1);

  TrainCli train;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train one agent and write its run artifacts");
  add_run_flags(train_cmd, train.run);
  train_cmd->add_option("--out", train.out_dir, "Output directory")->capture_default_str();

  EvalCli eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpointed policy");
  eval_cmd->add_option("--config", eval.config_path, "Run config the checkpoint belongs to")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--set", eval.sets, "Dotted-path override");
  eval_cmd->add_option("--checkpoint", eval.checkpoint_path, "Checkpoint file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", eval.episodes,
                       "Episode count (default: the config's absolute evaluation count)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval.eval_seed, "Evaluation stream seed (default: config seed)");
  eval_cmd->add_flag("--best", eval.use_best, "Evaluate the best policy seen instead of the final one");
  eval_cmd->add_option("--out", eval.out_dir, "Output directory")->capture_default_str();

  SweepCli sweep;
  SweepExportCli sweep_export;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Run a hyperparameter sweep; an interrupted log in --out is resumed");
  sweep_cmd->add_option("--config", sweep.config_path, "Sweep spec JSON")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--set", sweep.sets,
                        "Dotted-path override on the spec, e.g. --set base.env=chain-mdp");
  sweep_cmd->add_option("--seed", sweep.seed, "Sweep root seed");
  sweep_cmd->add_option("--budget", sweep.budget, "Trial budget for random search");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads, one trial each")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out_dir, "Output directory")->capture_default_str();
  CLI::App* export_cmd =
      sweep_cmd->add_subcommand("export", "Convert a sweep log for external tools");
  export_cmd->add_option("--log", sweep_export.log_path, "Sweep log to read")
      ->required()
      ->check(CLI::ExistingFile);
  export_cmd->add_option("--format", sweep_export.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  export_cmd->add_option("--out", sweep_export.out_dir, "Output directory")
      ->capture_default_str();

  MetricsCli metrics;
  CLI::App* metrics_cmd =
      app.add_subcommand("metrics", "Aggregate final scores into interval estimates");
  metrics_cmd->add_option("scores", metrics.score_files, "Score record JSONL files")
      ->required()
      ->check(CLI::ExistingFile);
  metrics_cmd
      ->add_option("--normalization", metrics.normalization,
                   "'reference' for the built-in table, or a task,min,max CSV file")
      ->required();
  metrics_cmd->add_option("--baseline", metrics.baseline,
                          "Improvement-probability baseline (default: first method)");
  metrics_cmd->add_option("--out", metrics.out_dir, "Output directory")->capture_default_str();

  PlotCli plot;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render a figure with its numbers as CSV");
  plot_cmd->add_option("kind", plot.kind, "Figure kind")
      ->required()
      ->check(CLI::IsMember({"aggregates", "poi", "profile", "efficiency", "sensitivity-1d",
                             "sensitivity-2d"}));
  plot_cmd->add_option("--metrics", plot.metrics_path, "metrics.json from the metrics command")
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--sweep", plot.sweep_log, "Sweep log from the sweep command")
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--scores", plot.score_files, "Score record JSONL files")
      ->check(CLI::ExistingFile);
  plot_cmd->add_option("--runs", plot.run_dirs, "Training output directories")
      ->check(CLI::ExistingDirectory);
  plot_cmd->add_option("--normalization", plot.normalization,
                       "'reference' or a task,min,max CSV file");
  plot_cmd->add_option("--axis", plot.axis_x, "Swept config path on the x axis");
  plot_cmd->add_option("--axis-y", plot.axis_y, "Second swept path for the heatmap");
  plot_cmd->add_option("--range", plot.range_text, "Objective normalization as min,max");
  plot_cmd->add_option("--points", plot.profile_points, "Profile threshold count")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  plot_cmd->add_option("--out", plot.out_dir, "Output directory")->capture_default_str();

  PresetsCli presets;
  CLI::App* presets_cmd =
      app.add_subcommand("presets", "Write a named preset as a config file");
  presets_cmd->add_option("name", presets.name, "Preset name (omit to list all)");
  presets_cmd->add_flag("--list", presets.list, "List every preset name");
  presets_cmd->add_option("--out", presets.out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*eval_cmd) return cmd_eval(eval);
    if (*sweep_cmd) return *export_cmd ? cmd_sweep_export(sweep_export) : cmd_sweep_run(sweep);
    if (*metrics_cmd) return cmd_metrics(metrics);
    if (*plot_cmd) return cmd_plot(plot);
    if (*presets_cmd) return cmd_presets(presets);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitConfig;
}
