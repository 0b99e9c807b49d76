#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ppolab/config.hpp"
#include "ppolab/inner_loop.hpp"
#include "ppolab/metrics.hpp"
#include "ppolab/outer.hpp"

namespace ppolab {

// ---- runnable desk-scale presets -------------------------------------------

// Full run configs for the native environments, sized so the learning and
// sweep checks in the acceptance suite fit on one core.
std::vector<std::string> run_preset_names();
RunConfig run_preset(const std::string& name);  // unknown name: error listing alternatives

// ---- reference tuning rows --------------------------------------------------

// One task's tuned hyperparameters: the PPO block shared by every strategy,
// plus the outer block of one strategy. Baseline rows carry the standard
// strategy; the lr/nesterov/biased rows reuse the same PPO block unchanged,
// so a sweep built on them keeps the base frozen by construction.
struct TuningPreset {
  std::string name;  // "<task>-baseline", "<task>-outer-lr", ...
  std::string task;
  PpoConfig ppo;
  OuterConfig outer;
};

const std::vector<TuningPreset>& tuning_presets();
const TuningPreset& tuning_preset(const std::string& name);

json tuning_preset_to_json(const TuningPreset& preset);
TuningPreset tuning_preset_from_json(const json& j);

// ---- sweep grids ------------------------------------------------------------

// The per-strategy search grids, every coordinate a multiple of 0.1. Axis
// values are generated from integer counters, so the same grid always
// serializes to the same bytes.
struct GridPreset {
  std::string name;
  std::vector<std::pair<std::string, std::vector<double>>> axes;  // config path -> values
};

const std::vector<GridPreset>& grid_presets();
const GridPreset& grid_preset(const std::string& name);

// ---- random-search space ----------------------------------------------------

// How a dimension of the baseline search is drawn: uniform on [lo,hi],
// log-uniform, an integer power of two with uniform exponent, or a uniform
// integer.
enum class SampleScale { linear, log, pow2, integer };

struct SweepRange {
  std::string path;  // dotted config path
  double lo = 0.0;
  double hi = 0.0;
  SampleScale scale = SampleScale::linear;
};

const std::vector<SweepRange>& baseline_search_ranges();

// ---- score normalization fixture --------------------------------------------

// Reference per-task return extremes for the fourteen benchmark tasks.
NormalizationTable reference_normalization_table();

// ---- unified lookup for the command line -------------------------------------

// Every preset name `presets NAME` accepts, and the JSON document it emits.
std::vector<std::string> all_preset_names();
json preset_document(const std::string& name);

}  // namespace ppolab
