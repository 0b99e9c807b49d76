#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ppolab/config.hpp"
#include "ppolab/presets.hpp"

namespace ppolab {

// What a trial is scored by: the mean return at the last intermediate
// evaluation point, or the best mean seen at any evaluation point.
enum class SweepObjective { final_eval_mean, best_eval_mean };

std::string sweep_objective_name(SweepObjective objective);
SweepObjective sweep_objective_from_name(const std::string& name);

// A sweep is either a grid (explicit value lists per config path, trials =
// cartesian product with the first axis slowest) or a random search (uniform
// draws from `ranges`, `trial_budget` trials). Exactly one of axes/ranges may
// be non-empty; grids leave trial_budget at zero.
struct SweepSpec {
  RunConfig base;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  std::vector<SweepRange> ranges;
  int seeds_per_trial = 4;
  int trial_budget = 0;
  SweepObjective objective = SweepObjective::final_eval_mean;
  std::uint64_t seed = 1;
};

json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const json& j);
SweepSpec load_sweep_spec(const std::string& path);
void validate(const SweepSpec& spec);

// Deterministic trial layout. Assignments depend only on (spec, trial), so a
// resumed sweep re-derives exactly the work the interrupted one had left.
int sweep_trial_count(const SweepSpec& spec);
std::vector<std::pair<std::string, double>> trial_assignment(const SweepSpec& spec, int trial);

// Base config with the trial's assignment applied. Integral values are
// written as integers so integer-typed fields accept them. If the assignment
// changes the iteration size (rollout length or env count), the transition
// budget is rounded up to the next full iteration.
RunConfig trial_config(const SweepSpec& spec, int trial);

// Training seed for one agent: root -> sweep stream -> trial -> agent.
std::uint64_t sweep_seed(std::uint64_t root_seed, int trial, int agent);

struct SeedOutcome {
  int agent = 0;
  std::uint64_t seed = 0;
  bool completed = false;
  bool nan_aborted = false;
  double final_eval_mean = 0.0;
  double best_eval_mean = 0.0;
};

// NaN when the run did not complete.
double seed_objective(const SeedOutcome& outcome, SweepObjective objective);

struct SweepTrial {
  int id = 0;
  std::vector<std::pair<std::string, double>> params;
  std::vector<SeedOutcome> seeds;  // agent order
  double objective = 0.0;          // mean over completed seeds; NaN if none
  bool done = false;               // false: every seed aborted (a gap in surfaces)
};

double trial_objective(const SweepTrial& trial, SweepObjective objective);

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepTrial> trials;  // ordered by id
};

// Runs every trial of the sweep, appending to the JSON-lines log at
// `log_path` as work completes: a spec header first, then one record per
// finished seed and one summary per finished trial. If the log already
// exists it must have been written for this same spec; seeds and trials it
// already holds are not rerun, so a killed sweep picks up where it stopped.
// `on_trial` (if set) fires once per newly summarized trial. Workers split
// the sweep at trial granularity; records go through one writer.
SweepResult run_sweep(const SweepSpec& spec, const std::string& log_path, int num_workers = 1,
                      const std::function<void(const SweepTrial&)>& on_trial = {});

// Rebuilds a SweepResult from a log alone (spec comes from the header).
// Trials the log has no summary for are returned with whatever seeds
// finished; a trailing half-written line from a kill is ignored.
SweepResult load_sweep(const std::string& log_path);

// Argmax of the trial objective over completed trials, ties to the lowest
// trial id. Throws if no trial completed.
const SweepTrial& best_trial(const SweepResult& result, SweepObjective objective);

// Mean objective as a function of one axis, pooling completed seeds across
// every trial sharing the axis value. stderr_value is the standard error of
// that pool (0 for a single seed); cells with no completed seeds hold NaN.
// When `range` is given, seed objectives are normalized to (v-min)/(max-min)
// first. `x` is sorted ascending.
struct SensitivityCurve {
  std::string axis;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> stderr_value;
};

SensitivityCurve sensitivity_curve(const SweepResult& result, const std::string& axis_x,
                                   const std::pair<double, double>* range = nullptr);

// Two-axis version: mean[yi][xi] over seeds pooled per cell, NaN for cells
// with no completed seeds (missing combinations included).
struct SensitivitySurface {
  std::string axis_x, axis_y;
  std::vector<double> x, y;
  std::vector<std::vector<double>> mean;  // indexed [y][x]
};

SensitivitySurface sensitivity_surface(const SweepResult& result, const std::string& axis_x,
                                       const std::string& axis_y,
                                       const std::pair<double, double>* range = nullptr);

// Flat table for external tools: one row per (trial, agent) with the trial's
// axis values, outcome fields, and the trial-level objective and status.
void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace ppolab
