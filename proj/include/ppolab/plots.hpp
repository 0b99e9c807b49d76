#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ppolab/metrics.hpp"
#include "ppolab/sweep.hpp"

namespace ppolab {

// Static vector-graphics emission for the reporting surfaces: every renderer
// returns one self-contained SVG document (no external fonts, scripts, or
// style sheets), sized for a report page. Inputs with nothing drawable raise
// std::invalid_argument. The write_*_csv companions put the exact plotted
// numbers next to each figure, doubles printed as %.17g so they parse back
// to the same values.

// Interval plot of the four aggregate estimates, one panel per metric and
// one row per method, whiskers spanning the bootstrap interval.
std::string render_aggregates_svg(
    const std::vector<std::pair<std::string, AggregateReport>>& reports);

// One row per comparison with the probability on [0,1] and a reference line
// at one half (no effect).
std::string render_poi_svg(const std::vector<std::pair<std::string, PointEstimate>>& comparisons);
void write_poi_csv(const std::vector<std::pair<std::string, PointEstimate>>& comparisons,
                   const std::string& path);

// Fraction of pooled runs above each threshold, one line per method.
std::string render_profile_svg(const std::vector<std::pair<std::string, ProfileCurve>>& curves);
void write_profile_csv(const std::vector<std::pair<std::string, ProfileCurve>>& curves,
                       const std::string& path);

// Mean normalized return against transitions with a standard-error band.
// `transitions` may be empty, in which case eval indices are used.
struct LabeledEfficiencyCurve {
  std::string label;
  std::vector<double> transitions;
  EfficiencyCurve curve;
};

std::string render_efficiency_svg(const std::vector<LabeledEfficiencyCurve>& curves);
void write_efficiency_csv(const std::vector<LabeledEfficiencyCurve>& curves,
                          const std::string& path);

// Objective against one swept parameter with a standard-error band; NaN
// cells break the line. `y_label` names the objective on the axis.
std::string render_sensitivity_curve_svg(const SensitivityCurve& curve,
                                         const std::string& y_label);
void write_sensitivity_curve_csv(const SensitivityCurve& curve, const std::string& path);

// Heatmap over two swept parameters; NaN cells are left blank (white), the
// way diverged trials read in the reference figures.
std::string render_sensitivity_surface_svg(const SensitivitySurface& surface,
                                           const std::string& title);
void write_sensitivity_surface_csv(const SensitivitySurface& surface, const std::string& path);

}  // namespace ppolab
