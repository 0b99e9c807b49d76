#include "ppolab/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ppolab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* kPalette[] = {"#3467a8", "#c23b3b", "#3c8a4b", "#8356a8", "#d07f2e", "#6b6b6b"};
constexpr int kPaletteSize = 6;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("plot: " + msg); }

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Short form for axis labels and coordinates.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

// Data range accumulator; stays invalid until it sees a finite value.
struct Extent {
  double lo = 0.0, hi = 0.0;
  bool seen = false;
  void include(double v) {
    if (!std::isfinite(v)) return;
    if (!seen) {
      lo = hi = v;
      seen = true;
      return;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!seen) return;
    if (lo == hi) {
      const double bump = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= bump;
      hi += bump;
      return;
    }
    const double margin = (hi - lo) * 0.05;
    lo -= margin;
    hi += margin;
  }
};

// Round tick positions at 1/2/5 times a power of ten.
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
  const double span = hi - lo;
  double step = std::pow(10.0, std::floor(std::log10(span / target)));
  while (span / step > target * 2) step *= 2.0;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (span / (step * m) <= target) {
      step *= m;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + step * 1e-9; t += step) ticks.push_back(t == 0.0 ? 0.0 : t);
  return ticks;
}

class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {
    body_ << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
          << "\" fill=\"#ffffff\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0, const std::string& dash = "") {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
          << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\"";
    if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
    body_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none") {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
          << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
          << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt(r)
          << "\" fill=\"" << fill << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "start",
            double size = 12.0, const std::string& fill = "#222222", bool middle_baseline = false,
            bool vertical = false) {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y)
          << "\" font-family=\"sans-serif\" font-size=\"" << fmt(size) << "\" fill=\"" << fill
          << "\" text-anchor=\"" << anchor << "\"";
    if (middle_baseline) body_ << " dominant-baseline=\"middle\"";
    if (vertical) body_ << " transform=\"rotate(-90 " << fmt(x) << ' ' << fmt(y) << ")\"";
    body_ << '>' << escape_text(s) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double stroke_width = 1.6) {
    if (pts.size() == 1) {
      circle(pts[0].first, pts[0].second, 2.2, stroke);
      return;
    }
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(stroke_width) << "\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt(x) << ',' << fmt(y) << ' ';
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
               double opacity) {
    body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity)
          << "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : pts) body_ << fmt(x) << ',' << fmt(y) << ' ';
    body_ << "\"/>\n";
  }

  std::string finish() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double width_, height_;
  std::ostringstream body_;
};

// Maps a data interval onto a pixel interval (y axes pass flipped pixels).
struct Scale {
  double d0 = 0.0, d1 = 1.0, p0 = 0.0, p1 = 1.0;
  double operator()(double v) const { return p0 + (v - d0) / (d1 - d0) * (p1 - p0); }
};

// Frame, ticks, and labels for one cartesian panel.
void draw_axes(Svg& svg, const Scale& x, const Scale& y, const std::string& x_label,
               const std::string& y_label) {
  const double left = x.p0, right = x.p1, top = y.p1, bottom = y.p0;
  svg.line(left, bottom, right, bottom, "#222222");
  svg.line(left, bottom, left, top, "#222222");
  for (double t : nice_ticks(x.d0, x.d1)) {
    svg.line(x(t), bottom, x(t), bottom + 4, "#222222");
    svg.text(x(t), bottom + 17, fmt(t), "middle", 11);
  }
  for (double t : nice_ticks(y.d0, y.d1)) {
    svg.line(left - 4, y(t), left, y(t), "#222222");
    svg.text(left - 7, y(t), fmt(t), "end", 11, "#222222", true);
  }
  if (!x_label.empty()) svg.text((left + right) / 2, bottom + 34, x_label, "middle", 12);
  if (!y_label.empty())
    svg.text(left - 46, (top + bottom) / 2, y_label, "middle", 12, "#222222", false, true);
}

void draw_legend(Svg& svg, const std::vector<std::string>& labels, double x, double y) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double row = y + static_cast<double>(i) * 16;
    svg.line(x, row, x + 18, row, kPalette[i % kPaletteSize], 2.0);
    svg.text(x + 23, row, labels[i], "start", 11, "#222222", true);
  }
}

// Splits a curve at NaN so gaps stay gaps, then draws each finite stretch.
void draw_broken_line(Svg& svg, const std::vector<double>& xs, const std::vector<double>& ys,
                      const Scale& sx, const Scale& sy, const std::string& color) {
  std::vector<std::pair<double, double>> segment;
  for (std::size_t i = 0; i <= xs.size(); ++i) {
    const bool finite = i < xs.size() && std::isfinite(ys[i]) && std::isfinite(xs[i]);
    if (finite) {
      segment.emplace_back(sx(xs[i]), sy(ys[i]));
      continue;
    }
    if (!segment.empty()) svg.polyline(segment, color);
    segment.clear();
  }
}

// Band polygons (mean +- spread) over each contiguous finite stretch.
void draw_band(Svg& svg, const std::vector<double>& xs, const std::vector<double>& mean,
               const std::vector<double>& spread, const Scale& sx, const Scale& sy,
               const std::string& color) {
  std::vector<std::size_t> stretch;
  auto flush = [&] {
    if (stretch.size() >= 2) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i : stretch) pts.emplace_back(sx(xs[i]), sy(mean[i] + spread[i]));
      for (auto it = stretch.rbegin(); it != stretch.rend(); ++it)
        pts.emplace_back(sx(xs[*it]), sy(mean[*it] - spread[*it]));
      svg.polygon(pts, color, 0.18);
    }
    stretch.clear();
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::isfinite(mean[i]) && std::isfinite(spread[i]) && std::isfinite(xs[i]))
      stretch.push_back(i);
    else
      flush();
  }
  flush();
}

// Two-segment color ramp (dark violet, teal, yellow) over [0,1].
std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
  const int a = t < 0.5 ? 0 : 1;
  const double u = t < 0.5 ? t * 2.0 : (t - 0.5) * 2.0;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[a][0] + (stops[a + 1][0] - stops[a][0]) * u)),
                static_cast<int>(std::lround(stops[a][1] + (stops[a + 1][1] - stops[a][1]) * u)),
                static_cast<int>(std::lround(stops[a][2] + (stops[a + 1][2] - stops[a][2]) * u)));
  return buf;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write '" + path + "'");
  return out;
}

void finish_csv(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail("write failed for '" + path + "'");
}

}  // namespace

// ---- aggregate interval panels -------------------------------------------------

std::string render_aggregates_svg(
    const std::vector<std::pair<std::string, AggregateReport>>& reports) {
  if (reports.empty()) fail("no aggregate reports to draw");
  const char* metric_names[4] = {"median", "IQM", "mean", "optimality gap"};

  const double rows = static_cast<double>(reports.size());
  const double panel_w = 150, panel_gap = 26, label_w = 110;
  const double row_h = 26, top = 40, bottom = 34;
  const double height = top + rows * row_h + bottom;
  const double width = label_w + 4 * (panel_w + panel_gap) + 10;
  Svg svg(width, height);

  for (int m = 0; m < 4; ++m) {
    const double x0 = label_w + m * (panel_w + panel_gap);
    Extent ex;
    for (const auto& [name, report] : reports) {
      const PointEstimate* e = m == 0   ? &report.median
                               : m == 1 ? &report.iqm
                               : m == 2 ? &report.mean
                                        : &report.optimality_gap;
      ex.include(e->ci_lo);
      ex.include(e->ci_hi);
      ex.include(e->value);
    }
    if (!ex.seen) fail("aggregate report holds no finite values");
    ex.pad();
    const Scale sx{ex.lo, ex.hi, x0, x0 + panel_w};

    svg.text(x0 + panel_w / 2, top - 18, metric_names[m], "middle", 13);
    svg.line(x0, top + rows * row_h, x0 + panel_w, top + rows * row_h, "#222222");
    for (double t : nice_ticks(ex.lo, ex.hi, 3)) {
      svg.line(sx(t), top + rows * row_h, sx(t), top + rows * row_h + 4, "#222222");
      svg.text(sx(t), top + rows * row_h + 16, fmt(t), "middle", 10);
    }

    for (std::size_t r = 0; r < reports.size(); ++r) {
      const AggregateReport& report = reports[r].second;
      const PointEstimate& e = m == 0   ? report.median
                               : m == 1 ? report.iqm
                               : m == 2 ? report.mean
                                        : report.optimality_gap;
      const double cy = top + (static_cast<double>(r) + 0.5) * row_h;
      const std::string color = kPalette[r % kPaletteSize];
      if (std::isfinite(e.ci_lo) && std::isfinite(e.ci_hi))
        svg.rect(sx(e.ci_lo), cy - 4, std::max(sx(e.ci_hi) - sx(e.ci_lo), 0.5), 8, color);
      if (std::isfinite(e.value)) svg.line(sx(e.value), cy - 7, sx(e.value), cy + 7, "#111111", 2.0);
      if (m == 0) svg.text(label_w - 8, cy, reports[r].first, "end", 12, "#222222", true);
    }
  }
  return svg.finish();
}

// ---- probability of improvement -------------------------------------------------

std::string render_poi_svg(
    const std::vector<std::pair<std::string, PointEstimate>>& comparisons) {
  if (comparisons.empty()) fail("no comparisons to draw");
  const double rows = static_cast<double>(comparisons.size());
  const double label_w = 190, plot_w = 360, row_h = 28, top = 34, bottom = 44;
  const double height = top + rows * row_h + bottom;
  Svg svg(label_w + plot_w + 24, height);

  const Scale sx{0.0, 1.0, label_w, label_w + plot_w};
  const double base_y = top + rows * row_h;
  svg.line(label_w, base_y, label_w + plot_w, base_y, "#222222");
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    svg.line(sx(t), base_y, sx(t), base_y + 4, "#222222");
    svg.text(sx(t), base_y + 17, fmt(t), "middle", 11);
  }
  svg.text(label_w + plot_w / 2, base_y + 34, "probability of improvement", "middle", 12);
  svg.line(sx(0.5), top - 6, sx(0.5), base_y, "#888888", 1.0, "4 3");

  for (std::size_t r = 0; r < comparisons.size(); ++r) {
    const auto& [label, e] = comparisons[r];
    const double cy = top + (static_cast<double>(r) + 0.5) * row_h;
    const std::string color = kPalette[r % kPaletteSize];
    svg.text(label_w - 8, cy, label, "end", 12, "#222222", true);
    svg.line(sx(std::clamp(e.ci_lo, 0.0, 1.0)), cy, sx(std::clamp(e.ci_hi, 0.0, 1.0)), cy, color,
             3.0);
    svg.circle(sx(std::clamp(e.value, 0.0, 1.0)), cy, 4.0, color);
  }
  return svg.finish();
}

void write_poi_csv(const std::vector<std::pair<std::string, PointEstimate>>& comparisons,
                   const std::string& path) {
  if (comparisons.empty()) fail("no comparisons to export");
  std::ofstream out = open_csv(path);
  out << "comparison,value,ci_lo,ci_hi\n";
  for (const auto& [label, e] : comparisons)
    out << label << ',' << format_full(e.value) << ',' << format_full(e.ci_lo) << ','
        << format_full(e.ci_hi) << '\n';
  finish_csv(out, path);
}

// ---- performance profiles --------------------------------------------------------

std::string render_profile_svg(
    const std::vector<std::pair<std::string, ProfileCurve>>& curves) {
  if (curves.empty()) fail("no profile curves to draw");
  Extent ex;
  for (const auto& [label, curve] : curves) {
    if (curve.thresholds.size() != curve.fraction.size())
      fail("profile thresholds and fractions disagree for '" + label + "'");
    for (double t : curve.thresholds) ex.include(t);
  }
  if (!ex.seen) fail("profile curves hold no finite thresholds");
  ex.pad();

  const double left = 64, right = 590, top = 30, bottom = 360;
  Svg svg(640, 410);
  const Scale sx{ex.lo, ex.hi, left, right};
  const Scale sy{0.0, 1.0, bottom, top};
  draw_axes(svg, sx, sy, "normalized score threshold", "fraction above");
  for (std::size_t i = 0; i < curves.size(); ++i)
    draw_broken_line(svg, curves[i].second.thresholds, curves[i].second.fraction, sx, sy,
                     kPalette[i % kPaletteSize]);
  std::vector<std::string> labels;
  for (const auto& [label, curve] : curves) labels.push_back(label);
  draw_legend(svg, labels, right - 150, top + 12);
  return svg.finish();
}

void write_profile_csv(const std::vector<std::pair<std::string, ProfileCurve>>& curves,
                       const std::string& path) {
  if (curves.empty()) fail("no profile curves to export");
  std::ofstream out = open_csv(path);
  out << "method,tau,fraction\n";
  for (const auto& [label, curve] : curves)
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i)
      out << label << ',' << format_full(curve.thresholds[i]) << ','
          << format_full(curve.fraction[i]) << '\n';
  finish_csv(out, path);
}

// ---- sample efficiency -------------------------------------------------------------

std::string render_efficiency_svg(const std::vector<LabeledEfficiencyCurve>& curves) {
  if (curves.empty()) fail("no efficiency curves to draw");
  Extent ex, ey;
  std::vector<std::vector<double>> xs(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const LabeledEfficiencyCurve& c = curves[i];
    if (c.curve.mean.size() != c.curve.stderr_value.size())
      fail("efficiency means and errors disagree for '" + c.label + "'");
    if (!c.transitions.empty() && c.transitions.size() != c.curve.mean.size())
      fail("efficiency x values and means disagree for '" + c.label + "'");
    for (std::size_t k = 0; k < c.curve.mean.size(); ++k) {
      const double x =
          c.transitions.empty() ? static_cast<double>(k) : c.transitions[k];
      xs[i].push_back(x);
      ex.include(x);
      ey.include(c.curve.mean[k] - c.curve.stderr_value[k]);
      ey.include(c.curve.mean[k] + c.curve.stderr_value[k]);
    }
  }
  if (!ex.seen || !ey.seen) fail("efficiency curves hold no finite values");
  ex.pad();
  ey.pad();

  const double left = 64, right = 590, top = 30, bottom = 360;
  Svg svg(640, 410);
  const Scale sx{ex.lo, ex.hi, left, right};
  const Scale sy{ey.lo, ey.hi, bottom, top};
  draw_axes(svg, sx, sy, "transitions", "mean normalized return");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    draw_band(svg, xs[i], curves[i].curve.mean, curves[i].curve.stderr_value, sx, sy,
              kPalette[i % kPaletteSize]);
    draw_broken_line(svg, xs[i], curves[i].curve.mean, sx, sy, kPalette[i % kPaletteSize]);
  }
  std::vector<std::string> labels;
  for (const LabeledEfficiencyCurve& c : curves) labels.push_back(c.label);
  draw_legend(svg, labels, left + 14, top + 12);
  return svg.finish();
}

void write_efficiency_csv(const std::vector<LabeledEfficiencyCurve>& curves,
                          const std::string& path) {
  if (curves.empty()) fail("no efficiency curves to export");
  std::ofstream out = open_csv(path);
  out << "method,transitions,mean,stderr\n";
  for (const LabeledEfficiencyCurve& c : curves)
    for (std::size_t k = 0; k < c.curve.mean.size(); ++k) {
      const double x = c.transitions.empty() ? static_cast<double>(k) : c.transitions[k];
      out << c.label << ',' << format_full(x) << ',' << format_full(c.curve.mean[k]) << ','
          << format_full(c.curve.stderr_value[k]) << '\n';
    }
  finish_csv(out, path);
}

// ---- sensitivity, one axis ----------------------------------------------------------

std::string render_sensitivity_curve_svg(const SensitivityCurve& curve,
                                         const std::string& y_label) {
  if (curve.x.empty()) fail("no sweep points to draw");
  Extent ex, ey;
  for (double v : curve.x) ex.include(v);
  for (std::size_t i = 0; i < curve.mean.size(); ++i) {
    ey.include(curve.mean[i] - curve.stderr_value[i]);
    ey.include(curve.mean[i] + curve.stderr_value[i]);
  }
  if (!ey.seen) fail("every sweep point is empty");
  ex.pad();
  ey.pad();

  const double left = 64, right = 600, top = 30, bottom = 360;
  Svg svg(640, 410);
  const Scale sx{ex.lo, ex.hi, left, right};
  const Scale sy{ey.lo, ey.hi, bottom, top};
  draw_axes(svg, sx, sy, curve.axis, y_label);
  draw_band(svg, curve.x, curve.mean, curve.stderr_value, sx, sy, kPalette[0]);
  draw_broken_line(svg, curve.x, curve.mean, sx, sy, kPalette[0]);
  for (std::size_t i = 0; i < curve.x.size(); ++i)
    if (std::isfinite(curve.mean[i])) svg.circle(sx(curve.x[i]), sy(curve.mean[i]), 2.6, kPalette[0]);
  return svg.finish();
}

void write_sensitivity_curve_csv(const SensitivityCurve& curve, const std::string& path) {
  if (curve.x.empty()) fail("no sweep points to export");
  std::ofstream out = open_csv(path);
  out << curve.axis << ",mean,stderr\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out << format_full(curve.x[i]) << ',';
    if (std::isfinite(curve.mean[i]))
      out << format_full(curve.mean[i]) << ',' << format_full(curve.stderr_value[i]);
    else
      out << ',';
    out << '\n';
  }
  finish_csv(out, path);
}

// ---- sensitivity, two axes -----------------------------------------------------------

std::string render_sensitivity_surface_svg(const SensitivitySurface& surface,
                                           const std::string& title) {
  if (surface.x.empty() || surface.y.empty()) fail("no sweep cells to draw");
  Extent ev;
  for (const std::vector<double>& row : surface.mean)
    for (double v : row) ev.include(v);
  if (!ev.seen) fail("every sweep cell is empty");
  const double span = ev.hi > ev.lo ? ev.hi - ev.lo : 1.0;

  const double nx = static_cast<double>(surface.x.size());
  const double ny = static_cast<double>(surface.y.size());
  const double cell = std::clamp(360.0 / std::max(nx, ny), 14.0, 44.0);
  const double left = 70, top = 38;
  const double width = left + nx * cell + 96, height = top + ny * cell + 58;
  Svg svg(width, height);

  svg.text(left + nx * cell / 2, top - 16, title.empty() ? "objective" : title, "middle", 13);

  // Row y[0] sits at the bottom so both axes increase away from the origin.
  for (std::size_t yi = 0; yi < surface.y.size(); ++yi) {
    for (std::size_t xi = 0; xi < surface.x.size(); ++xi) {
      const double v = surface.mean[yi][xi];
      if (!std::isfinite(v)) continue;  // blank cell marks a diverged trial
      const double px = left + static_cast<double>(xi) * cell;
      const double py = top + (ny - 1.0 - static_cast<double>(yi)) * cell;
      svg.rect(px, py, cell, cell, heat_color((v - ev.lo) / span));
    }
  }
  svg.rect(left, top, nx * cell, ny * cell, "none", "#222222");

  for (std::size_t xi = 0; xi < surface.x.size(); ++xi)
    svg.text(left + (static_cast<double>(xi) + 0.5) * cell, top + ny * cell + 15,
             fmt(surface.x[xi]), "middle", 10);
  for (std::size_t yi = 0; yi < surface.y.size(); ++yi)
    svg.text(left - 6, top + (ny - 0.5 - static_cast<double>(yi)) * cell, fmt(surface.y[yi]),
             "end", 10, "#222222", true);
  svg.text(left + nx * cell / 2, top + ny * cell + 36, surface.axis_x, "middle", 12);
  svg.text(left - 48, top + ny * cell / 2, surface.axis_y, "middle", 12, "#222222", false, true);

  // Color ramp legend with the data extremes.
  const double bar_x = left + nx * cell + 24, bar_h = ny * cell;
  for (int i = 0; i < 32; ++i)
    svg.rect(bar_x, top + bar_h - (i + 1) * bar_h / 32, 14, bar_h / 32 + 0.5,
             heat_color((i + 0.5) / 32.0));
  svg.rect(bar_x, top, 14, bar_h, "none", "#222222");
  svg.text(bar_x + 18, top + 4, fmt(ev.hi), "start", 10, "#222222", true);
  svg.text(bar_x + 18, top + bar_h - 4, fmt(ev.lo), "start", 10, "#222222", true);
  return svg.finish();
}

void write_sensitivity_surface_csv(const SensitivitySurface& surface, const std::string& path) {
  if (surface.x.empty() || surface.y.empty()) fail("no sweep cells to export");
  std::ofstream out = open_csv(path);
  out << surface.axis_y;
  for (double x : surface.x) out << ',' << format_full(x);
  out << '\n';
  for (std::size_t yi = 0; yi < surface.y.size(); ++yi) {
    out << format_full(surface.y[yi]);
    for (std::size_t xi = 0; xi < surface.x.size(); ++xi) {
      out << ',';
      const double v = surface.mean[yi][xi];
      if (std::isfinite(v)) out << format_full(v);
    }
    out << '\n';
  }
  finish_csv(out, path);
}

}  // namespace ppolab
