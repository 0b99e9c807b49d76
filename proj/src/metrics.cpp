#include "ppolab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ppolab/rng.hpp"

namespace ppolab {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("metrics: " + msg); }

void require_nonempty(const ScoreMatrix& m, int min_seeds) {
  if (m.scores.empty()) fail("empty score matrix");
  for (const auto& [task, vals] : m.scores) {
    if (static_cast<int>(vals.size()) < min_seeds)
      fail("task '" + task + "' has " + std::to_string(vals.size()) + " seeds, needs at least " +
           std::to_string(min_seeds));
    for (double v : vals)
      if (!std::isfinite(v)) fail("non-finite score in task '" + task + "'");
  }
}

// p-th quantile with linear interpolation between order statistics, over an
// already sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const auto n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// One stratified resample: per task, the same number of seeds drawn with
// replacement, concatenated in task order.
std::vector<double> resample_pooled(const ScoreMatrix& m, Rng& rng) {
  std::vector<double> out;
  for (const auto& [task, vals] : m.scores) {
    const auto n = vals.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back(vals[rng.below(n)]);
  }
  return out;
}

PointEstimate bootstrap_interval(double value, std::vector<double>& replicate_stats) {
  std::sort(replicate_stats.begin(), replicate_stats.end());
  PointEstimate e;
  e.value = value;
  e.ci_lo = sorted_quantile(replicate_stats, 0.025);
  e.ci_hi = sorted_quantile(replicate_stats, 0.975);
  return e;
}

// Per-task win rate of x over y with ties worth half a win. Counting in
// integers of half-wins keeps the identities exact: identical samples score
// half the pairs, and the two orientations always partition them.
double task_improvement(const std::vector<double>& x, const std::vector<double>& y) {
  double half_wins = 0.0;
  for (double a : x)
    for (double b : y) {
      if (a > b)
        half_wins += 2.0;
      else if (a == b)
        half_wins += 1.0;
    }
  return half_wins / (2.0 * static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double improvement_estimate(const ScoreMatrix& x, const ScoreMatrix& y) {
  double sum = 0.0;
  for (const auto& [task, xv] : x.scores) sum += task_improvement(xv, y.scores.at(task));
  return sum / static_cast<double>(x.scores.size());
}

std::vector<double> resample_seeds(const std::vector<double>& vals, Rng& rng) {
  std::vector<double> out(vals.size());
  for (auto& v : out) v = vals[rng.below(vals.size())];
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> ScoreMatrix::pooled() const {
  std::vector<double> out;
  for (const auto& [task, vals] : scores) out.insert(out.end(), vals.begin(), vals.end());
  return out;
}

double NormalizationTable::normalize(const std::string& task, double raw) const {
  const auto it = range.find(task);
  if (it == range.end()) fail("no normalization range for task '" + task + "'");
  const auto [lo, hi] = it->second;
  return (raw - lo) / (hi - lo);
}

NormalizationTable NormalizationTable::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "task,min,max")
    fail("'" + path + "' does not start with the 'task,min,max' header");
  NormalizationTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      fail("malformed normalization row '" + line + "'");
    const std::string task = line.substr(0, c1);
    double lo = 0.0, hi = 0.0;
    try {
      lo = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      hi = std::stod(line.substr(c2 + 1));
    } catch (const std::exception&) {
      fail("malformed normalization row '" + line + "'");
    }
    if (!(hi > lo)) fail("task '" + task + "' range needs max > min");
    if (!table.range.emplace(task, std::make_pair(lo, hi)).second)
      fail("duplicate normalization row for task '" + task + "'");
  }
  return table;
}

void NormalizationTable::to_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail("cannot write '" + path + "'");
  out << "task,min,max\n";
  for (const auto& [task, r] : range)
    out << task << ',' << format_double(r.first) << ',' << format_double(r.second) << '\n';
  if (!out) fail("write failed for '" + path + "'");
}

ScoreMatrix normalize(const ScoreMatrix& scores, const NormalizationTable& table) {
  ScoreMatrix out;
  out.method = scores.method;
  for (const auto& [task, vals] : scores.scores) {
    std::vector<double>& dst = out.scores[task];
    dst.reserve(vals.size());
    for (double v : vals) dst.push_back(table.normalize(task, v));
  }
  return out;
}

double pooled_median(std::vector<double> scores) {
  if (scores.empty()) fail("median of an empty sample");
  std::sort(scores.begin(), scores.end());
  const auto n = scores.size();
  return n % 2 == 1 ? scores[n / 2] : 0.5 * (scores[n / 2 - 1] + scores[n / 2]);
}

double pooled_iqm(std::vector<double> scores) {
  if (scores.empty()) fail("IQM of an empty sample");
  std::sort(scores.begin(), scores.end());
  // Trim a quarter from each end, rounding the trim count down, and average
  // what survives; 1..8 keeps {3,4,5,6} and reads 4.5.
  const auto n = scores.size();
  const auto g = n / 4;
  double sum = 0.0;
  for (std::size_t i = g; i < n - g; ++i) sum += scores[i];
  return sum / static_cast<double>(n - 2 * g);
}

double pooled_mean(const std::vector<double>& scores) {
  if (scores.empty()) fail("mean of an empty sample");
  double sum = 0.0;
  for (double v : scores) sum += v;
  return sum / static_cast<double>(scores.size());
}

double pooled_optimality_gap(const std::vector<double>& scores) {
  if (scores.empty()) fail("optimality gap of an empty sample");
  double sum = 0.0;
  for (double v : scores) sum += std::max(0.0, 1.0 - v);
  return sum / static_cast<double>(scores.size());
}

AggregateReport aggregate_point_estimates(const ScoreMatrix& normalized, int replicates,
                                          std::uint64_t seed) {
  require_nonempty(normalized, 2);
  if (replicates < 1) fail("need at least one bootstrap replicate");

  const std::vector<double> pooled = normalized.pooled();
  AggregateReport report;
  report.median.value = pooled_median(pooled);
  report.iqm.value = pooled_iqm(pooled);
  report.mean.value = pooled_mean(pooled);
  report.optimality_gap.value = pooled_optimality_gap(pooled);

  std::vector<double> med(replicates), iqm(replicates), mean(replicates), gap(replicates);
  const Rng base(seed);
  for (int r = 0; r < replicates; ++r) {
    Rng rng = base.fork(static_cast<std::uint64_t>(r));
    const std::vector<double> sample = resample_pooled(normalized, rng);
    med[r] = pooled_median(sample);
    iqm[r] = pooled_iqm(sample);
    mean[r] = pooled_mean(sample);
    gap[r] = pooled_optimality_gap(sample);
  }
  report.median = bootstrap_interval(report.median.value, med);
  report.iqm = bootstrap_interval(report.iqm.value, iqm);
  report.mean = bootstrap_interval(report.mean.value, mean);
  report.optimality_gap = bootstrap_interval(report.optimality_gap.value, gap);
  return report;
}

PointEstimate probability_of_improvement(const ScoreMatrix& method, const ScoreMatrix& baseline,
                                         int replicates, std::uint64_t seed) {
  require_nonempty(method, 1);
  require_nonempty(baseline, 1);
  if (replicates < 1) fail("need at least one bootstrap replicate");
  if (method.scores.size() != baseline.scores.size())
    fail("improvement needs the same tasks on both sides");
  for (const auto& [task, vals] : method.scores)
    if (baseline.scores.find(task) == baseline.scores.end())
      fail("baseline is missing task '" + task + "'");

  const double value = improvement_estimate(method, baseline);

  std::vector<double> stats(replicates);
  const Rng base(seed);
  for (int r = 0; r < replicates; ++r) {
    Rng rng = base.fork(static_cast<std::uint64_t>(r));
    // Both sides are resampled within each task: first the method's seeds,
    // then the baseline's, in task order.
    double sum = 0.0;
    for (const auto& [task, xv] : method.scores) {
      const std::vector<double> x = resample_seeds(xv, rng);
      const std::vector<double> y = resample_seeds(baseline.scores.at(task), rng);
      sum += task_improvement(x, y);
    }
    stats[r] = sum / static_cast<double>(method.scores.size());
  }
  return bootstrap_interval(value, stats);
}

ProfileCurve performance_profile(const ScoreMatrix& normalized,
                                 const std::vector<double>& thresholds) {
  require_nonempty(normalized, 1);
  const std::vector<double> pooled = normalized.pooled();
  ProfileCurve curve;
  curve.thresholds = thresholds;
  curve.fraction.reserve(thresholds.size());
  for (double tau : thresholds) {
    std::size_t above = 0;
    for (double v : pooled) above += v > tau ? 1 : 0;
    curve.fraction.push_back(static_cast<double>(above) / static_cast<double>(pooled.size()));
  }
  return curve;
}

EfficiencyCurve sample_efficiency_curve(const std::vector<RunCurve>& runs,
                                        const NormalizationTable& table) {
  if (runs.empty()) fail("sample efficiency needs at least one run");
  const std::size_t points = runs[0].returns.size();
  if (points == 0) fail("runs carry no eval points");
  for (const RunCurve& run : runs)
    if (run.returns.size() != points) fail("runs disagree on the number of eval points");

  EfficiencyCurve curve;
  curve.mean.resize(points);
  curve.stderr_value.resize(points);
  const auto n = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < points; ++i) {
    double sum = 0.0;
    for (const RunCurve& run : runs) sum += table.normalize(run.task, run.returns[i]);
    const double mean = sum / n;
    double ss = 0.0;
    for (const RunCurve& run : runs) {
      const double d = table.normalize(run.task, run.returns[i]) - mean;
      ss += d * d;
    }
    curve.mean[i] = mean;
    curve.stderr_value[i] = runs.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  }
  return curve;
}

std::vector<ScoreRecord> load_score_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open '" + path + "'");
  std::vector<ScoreRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      fail("line " + std::to_string(lineno) + " of '" + path + "' is not a JSON object");
    ScoreRecord rec;
    try {
      rec.method = j.at("method").get<std::string>();
      rec.task = j.at("task").get<std::string>();
      rec.seed = j.at("seed").get<std::uint64_t>();
      rec.value = j.at("return").get<double>();
    } catch (const json::exception& e) {
      fail("line " + std::to_string(lineno) + " of '" + path + "': " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

ScoreMatrix score_matrix_from_records(const std::vector<ScoreRecord>& records,
                                      const std::string& method) {
  std::map<std::string, std::map<std::uint64_t, double>> by_task;
  for (const ScoreRecord& rec : records) {
    if (rec.method != method) continue;
    if (!std::isfinite(rec.value))
      fail("non-finite return for task '" + rec.task + "' seed " + std::to_string(rec.seed));
    if (!by_task[rec.task].emplace(rec.seed, rec.value).second)
      fail("duplicate record for task '" + rec.task + "' seed " + std::to_string(rec.seed));
  }
  if (by_task.empty()) fail("no records for method '" + method + "'");
  ScoreMatrix m;
  m.method = method;
  for (const auto& [task, by_seed] : by_task) {
    std::vector<double>& dst = m.scores[task];
    for (const auto& [seed, value] : by_seed) dst.push_back(value);
  }
  return m;
}

std::vector<std::string> record_methods(const std::vector<ScoreRecord>& records) {
  std::vector<std::string> methods;
  for (const ScoreRecord& rec : records)
    if (std::find(methods.begin(), methods.end(), rec.method) == methods.end())
      methods.push_back(rec.method);
  return methods;
}

json aggregate_report_to_json(const AggregateReport& report) {
  auto estimate = [](const PointEstimate& e) {
    return json{{"value", e.value}, {"ci_lo", e.ci_lo}, {"ci_hi", e.ci_hi}};
  };
  json j;
  j["median"] = estimate(report.median);
  j["iqm"] = estimate(report.iqm);
  j["mean"] = estimate(report.mean);
  j["optimality_gap"] = estimate(report.optimality_gap);
  return j;
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<std::pair<std::string, AggregateReport>>& methods) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail("cannot write '" + path + "'");
  out << "method,metric,value,ci_lo,ci_hi\n";
  for (const auto& [name, report] : methods) {
    const std::pair<const char*, const PointEstimate*> rows[] = {
        {"median", &report.median},
        {"iqm", &report.iqm},
        {"mean", &report.mean},
        {"optimality_gap", &report.optimality_gap}};
    for (const auto& [metric, e] : rows)
      out << name << ',' << metric << ',' << format_double(e->value) << ','
          << format_double(e->ci_lo) << ',' << format_double(e->ci_hi) << '\n';
  }
  if (!out) fail("write failed for '" + path + "'");
}

}  // namespace ppolab
