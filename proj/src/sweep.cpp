#include "ppolab/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ppolab/driver.hpp"
#include "ppolab/rng.hpp"

namespace ppolab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Stream keys under the sweep's root seed, disjoint from the per-run keys
// since runs derive their streams from their own seed.
constexpr std::uint64_t kSweepSeedKey = 1ull << 34;
constexpr std::uint64_t kSweepParamsKey = (1ull << 34) + 1;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("sweep: " + msg); }

std::string format_csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* scale_name(SampleScale scale) {
  switch (scale) {
    case SampleScale::linear: return "linear";
    case SampleScale::log: return "log";
    case SampleScale::pow2: return "pow2";
    case SampleScale::integer: return "integer";
  }
  return "linear";
}

SampleScale scale_from_name(const std::string& name) {
  if (name == "linear") return SampleScale::linear;
  if (name == "log") return SampleScale::log;
  if (name == "pow2") return SampleScale::pow2;
  if (name == "integer") return SampleScale::integer;
  fail("unknown sample scale '" + name + "'");
}

bool is_power_of_two(double v) {
  if (v < 1.0 || v != std::floor(v) || v > 9.0e15) return false;
  const auto n = static_cast<std::uint64_t>(v);
  return (n & (n - 1)) == 0;
}

double read_double(const json& j, const std::string& what) {
  if (j.is_null()) return kNan;  // dump() writes non-finite values as null
  if (!j.is_number()) fail(what + " must be a number");
  return j.get<double>();
}

std::int64_t read_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) fail(what + " must be an integer");
  return j.get<std::int64_t>();
}

std::uint64_t read_u64(const json& j, const std::string& what) {
  if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    fail(what + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string read_string(const json& j, const std::string& what) {
  if (!j.is_string()) fail(what + " must be a string");
  return j.get<std::string>();
}

bool read_bool(const json& j, const std::string& what) {
  if (!j.is_boolean()) fail(what + " must be true or false");
  return j.get<bool>();
}

const json& record_field(const json& rec, const char* field, const std::string& path,
                         std::size_t line) {
  const auto it = rec.find(field);
  if (it == rec.end())
    fail("log '" + path + "' line " + std::to_string(line) + " lacks '" + field + "'");
  return *it;
}

// ---- log records --------------------------------------------------------------

json seed_record(int trial, const SeedOutcome& oc) {
  json j;
  j["kind"] = "seed";
  j["trial"] = trial;
  j["agent"] = oc.agent;
  j["seed"] = oc.seed;
  j["completed"] = oc.completed;
  j["nan_aborted"] = oc.nan_aborted;
  j["final_eval_mean"] = oc.final_eval_mean;
  j["best_eval_mean"] = oc.best_eval_mean;
  return j;
}

json trial_record(const SweepTrial& trial) {
  json j;
  j["kind"] = "trial";
  j["trial"] = trial.id;
  json params = json::object();
  for (const auto& [path, value] : trial.params) params[path] = value;
  j["params"] = params;
  j["status"] = trial.done ? "done" : "nan";
  if (trial.done)
    j["objective"] = trial.objective;
  else
    j["objective"] = nullptr;
  return j;
}

struct LogContents {
  json header_spec;  // null until the header record is seen
  std::map<std::pair<int, int>, SeedOutcome> seeds;
  std::set<int> summarized;
  std::uintmax_t valid_bytes = 0;  // offset just past the last complete line
  bool truncated_tail = false;     // bytes past valid_bytes, from a killed append
};

// Reads every complete line of the log. A record is only committed once its
// newline hits the file, so a kill leaves at most one incomplete tail line;
// everything before the last newline must parse, the tail is reported back
// for the resume path to trim.
LogContents parse_sweep_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open sweep log '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  LogContents log;
  const std::size_t last_newline = text.rfind('\n');
  const std::size_t body_size = last_newline == std::string::npos ? 0 : last_newline + 1;
  log.valid_bytes = body_size;
  log.truncated_tail = body_size < text.size();

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < body_size) {
    const std::size_t end = text.find('\n', start);
    if (end > start) lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    json rec = json::parse(lines[i], nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("kind"))
      fail("log '" + path + "' line " + std::to_string(i + 1) + " is not a sweep record");
    const std::string kind = read_string(rec.at("kind"), "record kind");
    if (kind == "sweep") {
      if (i != 0) fail("log '" + path + "' has a spec header past the first line");
      log.header_spec = rec.contains("spec") ? rec.at("spec") : json();
    } else if (kind == "seed") {
      const auto field = [&](const char* name) -> const json& {
        return record_field(rec, name, path, i + 1);
      };
      const int trial = static_cast<int>(read_int(field("trial"), "seed record trial"));
      const int agent = static_cast<int>(read_int(field("agent"), "seed record agent"));
      SeedOutcome oc;
      oc.agent = agent;
      oc.seed = read_u64(field("seed"), "seed record seed");
      oc.completed = read_bool(field("completed"), "seed record completed");
      oc.nan_aborted = read_bool(field("nan_aborted"), "seed record nan_aborted");
      oc.final_eval_mean = read_double(field("final_eval_mean"), "seed record final_eval_mean");
      oc.best_eval_mean = read_double(field("best_eval_mean"), "seed record best_eval_mean");
      if (!log.seeds.emplace(std::make_pair(trial, agent), oc).second)
        fail("log '" + path + "' repeats trial " + std::to_string(trial) + " agent " +
             std::to_string(agent));
    } else if (kind == "trial") {
      const int trial =
          static_cast<int>(read_int(record_field(rec, "trial", path, i + 1), "trial record id"));
      if (!log.summarized.insert(trial).second)
        fail("log '" + path + "' repeats trial id " + std::to_string(trial));
    } else {
      fail("log '" + path + "' line " + std::to_string(i + 1) + " has unknown kind '" + kind +
           "'");
    }
    if (i == 0 && kind != "sweep") fail("log '" + path + "' does not start with a spec header");
  }
  return log;
}

// All paths named by the sweep, for duplicate checks and base-config lookups.
std::vector<std::string> sweep_paths(const SweepSpec& spec) {
  std::vector<std::string> paths;
  for (const auto& [path, values] : spec.axes) paths.push_back(path);
  for (const SweepRange& range : spec.ranges) paths.push_back(range.path);
  return paths;
}

SeedOutcome run_one_seed(const SweepSpec& spec, int trial, int agent) {
  RunConfig cfg = trial_config(spec, trial);
  cfg.seed = sweep_seed(spec.seed, trial, agent);
  TrainingRun run(cfg);
  while (run.step()) {
  }
  const RunResult res = run.finish();
  SeedOutcome oc;
  oc.agent = agent;
  oc.seed = cfg.seed;
  oc.completed = res.completed;
  oc.nan_aborted = res.nan_aborted;
  oc.final_eval_mean = res.eval_points.empty() ? kNan : res.eval_points.back().mean_return;
  oc.best_eval_mean = res.best_mean;
  return oc;
}

// Index of `path` in every trial's params, or an error naming the axes that
// do exist.
std::size_t axis_index(const SweepResult& result, const std::string& path) {
  if (result.trials.empty()) throw std::invalid_argument("sweep: no trials to analyze");
  const auto& params = result.trials.front().params;
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].first == path) return i;
  std::ostringstream msg;
  msg << "sweep: no axis '" << path << "'; swept:";
  for (const auto& [p, v] : params) msg << ' ' << p;
  throw std::invalid_argument(msg.str());
}

double maybe_normalize(double v, const std::pair<double, double>* range) {
  if (range == nullptr) return v;
  return (v - range->first) / (range->second - range->first);
}

void check_range(const std::pair<double, double>* range) {
  if (range != nullptr && !(range->second > range->first))
    throw std::invalid_argument("sweep: normalization range needs max > min");
}

double pool_mean(const std::vector<double>& pool) {
  if (pool.empty()) return kNan;
  double sum = 0.0;
  for (double v : pool) sum += v;
  return sum / static_cast<double>(pool.size());
}

double pool_stderr(const std::vector<double>& pool) {
  if (pool.empty()) return kNan;
  if (pool.size() == 1) return 0.0;
  const double mean = pool_mean(pool);
  double ss = 0.0;
  for (double v : pool) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(pool.size() - 1) / static_cast<double>(pool.size()));
}

}  // namespace

std::string sweep_objective_name(SweepObjective objective) {
  return objective == SweepObjective::final_eval_mean ? "final_eval_mean" : "best_eval_mean";
}

SweepObjective sweep_objective_from_name(const std::string& name) {
  if (name == "final_eval_mean") return SweepObjective::final_eval_mean;
  if (name == "best_eval_mean") return SweepObjective::best_eval_mean;
  fail("unknown objective '" + name + "'; use final_eval_mean or best_eval_mean");
}

json sweep_spec_to_json(const SweepSpec& spec) {
  json j;
  j["base"] = run_config_to_json(spec.base);
  json axes = json::object();
  for (const auto& [path, values] : spec.axes) axes[path] = values;
  j["axes"] = axes;
  json ranges = json::array();
  for (const SweepRange& r : spec.ranges) {
    json rj;
    rj["path"] = r.path;
    rj["lo"] = r.lo;
    rj["hi"] = r.hi;
    rj["scale"] = scale_name(r.scale);
    ranges.push_back(rj);
  }
  j["ranges"] = ranges;
  j["seeds_per_trial"] = spec.seeds_per_trial;
  j["trial_budget"] = spec.trial_budget;
  j["objective"] = sweep_objective_name(spec.objective);
  j["seed"] = spec.seed;
  return j;
}

SweepSpec sweep_spec_from_json(const json& j) {
  if (!j.is_object()) fail("spec must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "base" && key != "axes" && key != "ranges" && key != "seeds_per_trial" &&
        key != "trial_budget" && key != "objective" && key != "seed")
      fail("unknown spec key '" + key + "'");
  }
  SweepSpec spec;
  if (j.contains("base")) spec.base = run_config_from_json(j.at("base"));
  if (j.contains("axes")) {
    const json& axes = j.at("axes");
    if (!axes.is_object()) fail("axes must be an object of path -> values");
    for (const auto& [path, values] : axes.items()) {
      if (!values.is_array() || values.empty()) fail("axis '" + path + "' needs a value array");
      std::vector<double> grid;
      for (const json& v : values) grid.push_back(read_double(v, "axis '" + path + "' value"));
      spec.axes.emplace_back(path, std::move(grid));
    }
  }
  if (j.contains("ranges")) {
    const json& ranges = j.at("ranges");
    if (!ranges.is_array()) fail("ranges must be an array");
    for (const json& rj : ranges) {
      if (!rj.is_object()) fail("each range must be an object");
      for (const auto& [key, value] : rj.items())
        if (key != "path" && key != "lo" && key != "hi" && key != "scale")
          fail("unknown range key '" + key + "'");
      SweepRange r;
      r.path = read_string(rj.at("path"), "range path");
      r.lo = read_double(rj.at("lo"), "range lo");
      r.hi = read_double(rj.at("hi"), "range hi");
      r.scale = scale_from_name(read_string(rj.at("scale"), "range scale"));
      spec.ranges.push_back(std::move(r));
    }
  }
  if (j.contains("seeds_per_trial"))
    spec.seeds_per_trial = static_cast<int>(read_int(j.at("seeds_per_trial"), "seeds_per_trial"));
  if (j.contains("trial_budget"))
    spec.trial_budget = static_cast<int>(read_int(j.at("trial_budget"), "trial_budget"));
  if (j.contains("objective"))
    spec.objective = sweep_objective_from_name(read_string(j.at("objective"), "objective"));
  if (j.contains("seed")) spec.seed = read_u64(j.at("seed"), "seed");
  return spec;
}

SweepSpec load_sweep_spec(const std::string& path) { return sweep_spec_from_json(load_json_file(path)); }

void validate(const SweepSpec& spec) {
  validate(spec.base);
  if (spec.axes.empty() && spec.ranges.empty()) fail("spec needs grid axes or search ranges");
  if (!spec.axes.empty() && !spec.ranges.empty()) fail("spec cannot mix grid axes and search ranges");
  if (spec.seeds_per_trial < 1) fail("seeds_per_trial must be >= 1");
  if (!spec.axes.empty() && spec.trial_budget != 0)
    fail("trial_budget applies to random search; grids enumerate fully");
  if (!spec.ranges.empty() && spec.trial_budget < 1)
    fail("random search needs trial_budget >= 1");

  const json base = run_config_to_json(spec.base);
  std::set<std::string> seen;
  for (const std::string& path : sweep_paths(spec)) {
    if (!seen.insert(path).second) fail("duplicate sweep axis '" + path + "'");
    const json* node = get_json_path(base, path);
    if (node == nullptr) fail("no such config key '" + path + "'");
    if (!node->is_number()) fail("sweep axis '" + path + "' is not a numeric config key");
  }
  for (const auto& [path, values] : spec.axes)
    for (double v : values)
      if (!std::isfinite(v)) fail("axis '" + path + "' has a non-finite value");
  for (const SweepRange& r : spec.ranges) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
      fail("range '" + r.path + "' needs finite lo < hi");
    if (r.scale == SampleScale::log && !(r.lo > 0.0))
      fail("log range '" + r.path + "' needs lo > 0");
    if (r.scale == SampleScale::pow2 && (!is_power_of_two(r.lo) || !is_power_of_two(r.hi)))
      fail("pow2 range '" + r.path + "' needs lo and hi to be powers of two");
    if (r.scale == SampleScale::integer &&
        (r.lo != std::floor(r.lo) || r.hi != std::floor(r.hi)))
      fail("integer range '" + r.path + "' needs integral bounds");
  }
}

int sweep_trial_count(const SweepSpec& spec) {
  if (!spec.axes.empty()) {
    long long product = 1;
    for (const auto& [path, values] : spec.axes) {
      product *= static_cast<long long>(values.size());
      if (product > 1000000) fail("grid larger than one million trials");
    }
    return static_cast<int>(product);
  }
  return spec.trial_budget;
}

std::vector<std::pair<std::string, double>> trial_assignment(const SweepSpec& spec, int trial) {
  std::vector<std::pair<std::string, double>> assignment;
  if (!spec.axes.empty()) {
    // First axis slowest: trial id counts the cartesian product in row-major
    // order, so the layout is stable however many axes there are.
    long long stride = 1;
    for (const auto& [path, values] : spec.axes) stride *= static_cast<long long>(values.size());
    long long rest = trial;
    for (const auto& [path, values] : spec.axes) {
      stride /= static_cast<long long>(values.size());
      const auto idx = static_cast<std::size_t>(rest / stride);
      rest %= stride;
      assignment.emplace_back(path, values[idx]);
    }
    return assignment;
  }
  Rng rng = Rng(spec.seed).fork(kSweepParamsKey).fork(static_cast<std::uint64_t>(trial));
  for (const SweepRange& r : spec.ranges) {
    double value = 0.0;
    switch (r.scale) {
      case SampleScale::linear:
        value = rng.uniform(r.lo, r.hi);
        break;
      case SampleScale::log:
        value = std::exp(rng.uniform(std::log(r.lo), std::log(r.hi)));
        break;
      case SampleScale::pow2: {
        const auto lo_exp = static_cast<std::uint64_t>(std::llround(std::log2(r.lo)));
        const auto hi_exp = static_cast<std::uint64_t>(std::llround(std::log2(r.hi)));
        value = std::ldexp(1.0, static_cast<int>(lo_exp + rng.below(hi_exp - lo_exp + 1)));
        break;
      }
      case SampleScale::integer: {
        const auto lo = static_cast<std::int64_t>(r.lo);
        const auto hi = static_cast<std::int64_t>(r.hi);
        value = static_cast<double>(lo + static_cast<std::int64_t>(
                                             rng.below(static_cast<std::uint64_t>(hi - lo + 1))));
        break;
      }
    }
    assignment.emplace_back(r.path, value);
  }
  return assignment;
}

RunConfig trial_config(const SweepSpec& spec, int trial) {
  json j = run_config_to_json(spec.base);
  for (const auto& [path, value] : trial_assignment(spec, trial)) {
    double integral = 0.0;
    if (std::modf(value, &integral) == 0.0 && std::abs(value) < 9.0e18)
      set_json_path(j, path, json(static_cast<std::int64_t>(value)));
    else
      set_json_path(j, path, json(value));
  }
  RunConfig cfg = run_config_from_json(j);
  // A sampled rollout length or env count changes the iteration size; keep
  // the budget at no less than the requested transitions by rounding up to
  // the next whole iteration.
  const std::uint64_t iteration =
      static_cast<std::uint64_t>(cfg.ppo.rollout_length) *
      static_cast<std::uint64_t>(cfg.ppo.num_envs);
  if (cfg.total_transitions % iteration != 0 || cfg.total_transitions == 0)
    cfg.total_transitions = (cfg.total_transitions / iteration + 1) * iteration;
  validate(cfg);
  return cfg;
}

std::uint64_t sweep_seed(std::uint64_t root_seed, int trial, int agent) {
  return Rng(root_seed)
      .fork(kSweepSeedKey)
      .fork(static_cast<std::uint64_t>(trial))
      .fork(static_cast<std::uint64_t>(agent))
      .state();
}

double seed_objective(const SeedOutcome& outcome, SweepObjective objective) {
  if (!outcome.completed) return kNan;
  return objective == SweepObjective::final_eval_mean ? outcome.final_eval_mean
                                                      : outcome.best_eval_mean;
}

double trial_objective(const SweepTrial& trial, SweepObjective objective) {
  double sum = 0.0;
  int count = 0;
  for (const SeedOutcome& oc : trial.seeds) {
    if (!oc.completed) continue;
    sum += seed_objective(oc, objective);
    ++count;
  }
  return count == 0 ? kNan : sum / static_cast<double>(count);
}

SweepResult run_sweep(const SweepSpec& spec, const std::string& log_path, int num_workers,
                      const std::function<void(const SweepTrial&)>& on_trial) {
  validate(spec);
  const int n_trials = sweep_trial_count(spec);
  const json spec_json = sweep_spec_to_json(spec);

  LogContents log;
  bool fresh = true;
  {
    std::error_code ec;
    if (std::filesystem::exists(log_path, ec) && std::filesystem::file_size(log_path, ec) > 0)
      fresh = false;
  }
  if (!fresh) {
    log = parse_sweep_log(log_path);
    if (log.valid_bytes == 0) {
      // Killed before the header's newline made it out: start over.
      log = LogContents{};
      fresh = true;
      std::error_code ec;
      std::filesystem::resize_file(log_path, 0, ec);
      if (ec) throw std::runtime_error("sweep: cannot repair '" + log_path + "'");
    } else {
      if (log.header_spec.is_null())
        fail("log '" + log_path + "' does not start with a spec header");
      if (log.header_spec != spec_json)
        fail("log '" + log_path + "' was written for a different spec");
      for (const auto& [key, oc] : log.seeds)
        if (key.first < 0 || key.first >= n_trials || key.second < 0 ||
            key.second >= spec.seeds_per_trial)
          fail("log '" + log_path + "' holds trial " + std::to_string(key.first) + " agent " +
               std::to_string(key.second) + ", outside this sweep");
      for (int id : log.summarized)
        if (id < 0 || id >= n_trials)
          fail("log '" + log_path + "' holds trial id " + std::to_string(id) +
               ", outside this sweep");
      if (log.truncated_tail) {
        std::error_code ec;
        std::filesystem::resize_file(log_path, log.valid_bytes, ec);
        if (ec) throw std::runtime_error("sweep: cannot repair '" + log_path + "'");
      }
    }
  }

  std::ofstream out(log_path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("sweep: cannot write '" + log_path + "'");
  if (fresh) {
    json header;
    header["kind"] = "sweep";
    header["spec"] = spec_json;
    out << header.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("sweep: write failed for '" + log_path + "'");
  }

  std::vector<SweepTrial> trials(static_cast<std::size_t>(n_trials));
  std::mutex writer;

  auto run_trial = [&](int t) {
    SweepTrial trial;
    trial.id = t;
    trial.params = trial_assignment(spec, t);
    for (int a = 0; a < spec.seeds_per_trial; ++a) {
      const auto it = log.seeds.find({t, a});
      if (it != log.seeds.end()) {
        trial.seeds.push_back(it->second);
        continue;
      }
      SeedOutcome oc = run_one_seed(spec, t, a);
      {
        const std::lock_guard<std::mutex> hold(writer);
        out << seed_record(t, oc).dump() << '\n';
        out.flush();
        if (!out) throw std::runtime_error("sweep: write failed for '" + log_path + "'");
      }
      trial.seeds.push_back(oc);
    }
    trial.objective = trial_objective(trial, spec.objective);
    trial.done = false;
    for (const SeedOutcome& oc : trial.seeds) trial.done = trial.done || oc.completed;
    if (log.summarized.find(t) == log.summarized.end()) {
      const std::lock_guard<std::mutex> hold(writer);
      out << trial_record(trial).dump() << '\n';
      out.flush();
      if (!out) throw std::runtime_error("sweep: write failed for '" + log_path + "'");
      if (on_trial) on_trial(trial);
    }
    trials[static_cast<std::size_t>(t)] = std::move(trial);
  };

  const int workers = std::max(1, std::min(num_workers, n_trials));
  if (workers == 1) {
    for (int t = 0; t < n_trials; ++t) run_trial(t);
  } else {
    std::atomic<int> cursor{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!stop.load()) {
          const int t = cursor.fetch_add(1);
          if (t >= n_trials) return;
          try {
            run_trial(t);
          } catch (...) {
            const std::lock_guard<std::mutex> hold(error_mu);
            if (!error) error = std::current_exception();
            stop.store(true);
            return;
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  return SweepResult{spec, std::move(trials)};
}

SweepResult load_sweep(const std::string& log_path) {
  const LogContents log = parse_sweep_log(log_path);
  if (log.header_spec.is_null())
    fail("log '" + log_path + "' does not start with a spec header");
  SweepSpec spec = sweep_spec_from_json(log.header_spec);
  validate(spec);
  const int n_trials = sweep_trial_count(spec);

  SweepResult result;
  result.spec = std::move(spec);
  for (int t = 0; t < n_trials; ++t) {
    SweepTrial trial;
    trial.id = t;
    trial.params = trial_assignment(result.spec, t);
    for (int a = 0; a < result.spec.seeds_per_trial; ++a) {
      const auto it = log.seeds.find({t, a});
      if (it != log.seeds.end()) trial.seeds.push_back(it->second);
    }
    trial.objective = trial_objective(trial, result.spec.objective);
    trial.done = false;
    for (const SeedOutcome& oc : trial.seeds) trial.done = trial.done || oc.completed;
    result.trials.push_back(std::move(trial));
  }
  return result;
}

const SweepTrial& best_trial(const SweepResult& result, SweepObjective objective) {
  const SweepTrial* best = nullptr;
  double best_value = 0.0;
  for (const SweepTrial& trial : result.trials) {
    if (!trial.done) continue;
    const double value = trial_objective(trial, objective);
    if (best == nullptr || value > best_value) {
      best = &trial;
      best_value = value;
    }
  }
  if (best == nullptr) throw std::invalid_argument("sweep: no completed trials");
  return *best;
}

SensitivityCurve sensitivity_curve(const SweepResult& result, const std::string& axis_x,
                                   const std::pair<double, double>* range) {
  check_range(range);
  const std::size_t xi = axis_index(result, axis_x);

  std::map<double, std::vector<double>> cells;
  for (const SweepTrial& trial : result.trials) {
    std::vector<double>& pool = cells[trial.params[xi].second];
    for (const SeedOutcome& oc : trial.seeds)
      if (oc.completed)
        pool.push_back(maybe_normalize(seed_objective(oc, result.spec.objective), range));
  }

  SensitivityCurve curve;
  curve.axis = axis_x;
  for (const auto& [x, pool] : cells) {
    curve.x.push_back(x);
    curve.mean.push_back(pool_mean(pool));
    curve.stderr_value.push_back(pool_stderr(pool));
  }
  return curve;
}

SensitivitySurface sensitivity_surface(const SweepResult& result, const std::string& axis_x,
                                       const std::string& axis_y,
                                       const std::pair<double, double>* range) {
  check_range(range);
  const std::size_t xi = axis_index(result, axis_x);
  const std::size_t yi = axis_index(result, axis_y);
  if (xi == yi) throw std::invalid_argument("sweep: surface needs two different axes");

  std::set<double> xs, ys;
  for (const SweepTrial& trial : result.trials) {
    xs.insert(trial.params[xi].second);
    ys.insert(trial.params[yi].second);
  }
  SensitivitySurface surface;
  surface.axis_x = axis_x;
  surface.axis_y = axis_y;
  surface.x.assign(xs.begin(), xs.end());
  surface.y.assign(ys.begin(), ys.end());

  std::map<std::pair<double, double>, std::vector<double>> cells;
  for (const SweepTrial& trial : result.trials) {
    std::vector<double>& pool = cells[{trial.params[yi].second, trial.params[xi].second}];
    for (const SeedOutcome& oc : trial.seeds)
      if (oc.completed)
        pool.push_back(maybe_normalize(seed_objective(oc, result.spec.objective), range));
  }

  for (double y : surface.y) {
    std::vector<double> row;
    for (double x : surface.x) {
      const auto it = cells.find({y, x});
      row.push_back(it == cells.end() ? kNan : pool_mean(it->second));
    }
    surface.mean.push_back(std::move(row));
  }
  return surface;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("sweep: cannot write '" + path + "'");

  std::vector<std::string> paths;
  if (!result.trials.empty())
    for (const auto& [p, v] : result.trials.front().params) paths.push_back(p);

  out << "trial";
  for (const std::string& p : paths) out << ',' << p;
  out << ",agent,seed,completed,nan_aborted,final_eval_mean,best_eval_mean,trial_objective,"
         "trial_status\n";
  for (const SweepTrial& trial : result.trials) {
    for (const SeedOutcome& oc : trial.seeds) {
      out << trial.id;
      for (const auto& [p, v] : trial.params) out << ',' << format_csv_double(v);
      out << ',' << oc.agent << ',' << oc.seed << ',' << (oc.completed ? 1 : 0) << ','
          << (oc.nan_aborted ? 1 : 0) << ',' << format_csv_double(oc.final_eval_mean) << ','
          << format_csv_double(oc.best_eval_mean) << ','
          << format_csv_double(trial.objective) << ',' << (trial.done ? "done" : "nan") << '\n';
    }
  }
  if (!out) throw std::runtime_error("sweep: write failed for '" + path + "'");
  out.flush();
  if (!out) throw std::runtime_error("sweep: write failed for '" + path + "'");
}

}  // namespace ppolab
