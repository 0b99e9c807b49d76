#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ppolab/config.hpp"

namespace ppolab {

// Final scores of one method: per task, one absolute mean return per seed.
// The map keeps tasks in name order, so pooling across tasks is deterministic.
struct ScoreMatrix {
  std::string method;
  std::map<std::string, std::vector<double>> scores;

  // All task x seed cells concatenated in task order.
  std::vector<double> pooled() const;
};

// Per-task return range used to map raw scores onto [0,1].
struct NormalizationTable {
  std::map<std::string, std::pair<double, double>> range;  // task -> (min, max)

  double normalize(const std::string& task, double raw) const;

  // CSV with a "task,min,max" header line, one task per row.
  static NormalizationTable from_csv(const std::string& path);
  void to_csv(const std::string& path) const;
};

// s' = (s - min)/(max - min), deliberately unclipped: a value outside [0,1]
// means the table no longer covers the observed extremes.
ScoreMatrix normalize(const ScoreMatrix& scores, const NormalizationTable& table);

struct PointEstimate {
  double value = 0.0;
  double ci_lo = 0.0;  // 95% stratified-bootstrap percentile interval
  double ci_hi = 0.0;
};

struct AggregateReport {
  PointEstimate median;
  PointEstimate iqm;  // mean of the middle 50% of pooled scores
  PointEstimate mean;
  PointEstimate optimality_gap;  // mean of max(0, 1 - s)
};

// Statistics of a pooled sample, exposed for oracles and the report.
double pooled_median(std::vector<double> scores);
double pooled_iqm(std::vector<double> scores);
double pooled_mean(const std::vector<double>& scores);
double pooled_optimality_gap(const std::vector<double>& scores);

// Bootstrap scheme shared by the aggregate and improvement estimates, pinned
// here so an external reimplementation can reproduce the intervals: replicate
// r draws from Rng(seed).fork(r), resampling each task's seeds in task order
// with below(n) index draws; intervals are the 2.5%/97.5% percentiles of the
// replicate statistics with linear interpolation between order statistics.
inline constexpr int kBootstrapReplicates = 2000;
inline constexpr std::uint64_t kBootstrapSeed = 0x5EED5EED;

// Point estimates over the pooled task x seed scores with stratified
// bootstrap intervals (seeds resampled within each task). Requires at least
// two seeds for every task.
AggregateReport aggregate_point_estimates(const ScoreMatrix& normalized,
                                          int replicates = kBootstrapReplicates,
                                          std::uint64_t seed = kBootstrapSeed);

// P(method > baseline): per task the mean over all seed pairs of
// 1 [x > y], 0.5 [x = y], 0 [x < y], averaged over tasks. Identical inputs
// give exactly 0.5, and the two orientations sum to one. Both matrices must
// cover the same tasks.
PointEstimate probability_of_improvement(const ScoreMatrix& method,
                                         const ScoreMatrix& baseline,
                                         int replicates = kBootstrapReplicates,
                                         std::uint64_t seed = kBootstrapSeed);

struct ProfileCurve {
  std::vector<double> thresholds;
  std::vector<double> fraction;  // of pooled scores strictly above each threshold
};

// F(tau) = fraction of all task x seed scores > tau; non-increasing in tau.
ProfileCurve performance_profile(const ScoreMatrix& normalized,
                                 const std::vector<double>& thresholds);

// One training run's evaluation trace, raw returns per eval point.
struct RunCurve {
  std::string task;
  std::vector<double> returns;
};

struct EfficiencyCurve {
  std::vector<double> mean;          // normalized, per eval index
  std::vector<double> stderr_value;  // ddof=1 standard error, 0 for one run
};

// Normalizes each run by its task's range, then aggregates across runs at
// each eval index. All runs must share the same number of eval points.
EfficiencyCurve sample_efficiency_curve(const std::vector<RunCurve>& runs,
                                        const NormalizationTable& table);

// One line of a run-result file: {"method": ..., "task": ..., "seed": ...,
// "return": ...}.
struct ScoreRecord {
  std::string method;
  std::string task;
  std::uint64_t seed = 0;
  double value = 0.0;
};

std::vector<ScoreRecord> load_score_records(const std::string& path);

// Collects one method's records into a matrix, seeds in ascending order.
// Duplicate (task, seed) cells and non-finite values are errors.
ScoreMatrix score_matrix_from_records(const std::vector<ScoreRecord>& records,
                                      const std::string& method);

// Methods present in a record set, in first-appearance order.
std::vector<std::string> record_methods(const std::vector<ScoreRecord>& records);

// Emission used by the command line: full report as JSON, and a flat
// "method,metric,value,ci_lo,ci_hi" CSV carrying the same numbers.
json aggregate_report_to_json(const AggregateReport& report);
void write_aggregate_csv(const std::string& path,
                         const std::vector<std::pair<std::string, AggregateReport>>& methods);

}  // namespace ppolab
