#include "grapeclose/plot.hpp"

#include <algorithm>
#include <cmath>

#include "grapeclose/error.hpp"
#include "grapeclose/format.hpp"
#include "grapeclose/maskops.hpp"

namespace grapeclose {

BoxStats boxplot_stats(std::span<const double> values, double whisker) {
  if (values.empty()) throw ArgumentError("box plot of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxStats s;
  s.n = v.size();
  s.q1 = percentile_sorted(v, 25.0);
  s.median = percentile_sorted(v, 50.0);
  s.q3 = percentile_sorted(v, 75.0);
  const double iqr = s.q3 - s.q1;
  const double lo = s.q1 - whisker * iqr;
  const double hi = s.q3 + whisker * iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  for (double x : v) {
    if (x >= lo) {
      s.whisker_low = std::min(x, s.q1);
      break;
    }
  }
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    if (*it <= hi) {
      s.whisker_high = std::max(*it, s.q3);
      break;
    }
  }
  for (double x : v) {
    if (x < lo || x > hi) s.outliers.push_back(x);
  }
  return s;
}

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) { return format_fixed(v, 2); }

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

double nice_step(double range, int target) {
  if (!(range > 0)) return 1.0;
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f <= 1 ? 1 : f <= 2 ? 2 : f <= 5 ? 5 : 10;
  return nice * mag;
}

struct Axis {
  double lo;
  double hi;
  double step;
};

Axis make_axis(double lo, double hi) {
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double step = nice_step(hi - lo, 5);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
             num(x2) + "\" y2=\"" + num(y2) + "\" stroke=\"" +
             std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }
  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none") {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
             num(w) + "\" height=\"" + num(h) + "\" fill=\"" +
             std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
  }
  void circle(double cx, double cy, double r, std::string_view fill,
              std::string_view stroke) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
             num(r) + "\" fill=\"" + std::string(fill) + "\" stroke=\"" +
             std::string(stroke) + "\"/>\n";
  }
  void text(double x, double y, std::string_view s, std::string_view anchor,
            int size = 12, double rotate = 0) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) +
             "\" font-family=\"sans-serif\" font-size=\"" +
             std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) +
             "\"";
    if (rotate != 0) {
      body_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " +
               num(y) + ")\"";
    }
    body_ += ">" + escape(s) + "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts,
                std::string_view stroke, double width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
             "\" stroke-width=\"" + num(width) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ += ' ';
      body_ += num(pts[i].first) + "," + num(pts[i].second);
    }
    body_ += "\"/>\n";
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<!-- grapeclose " + std::string(kToolVersion) + " -->\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) +
           "\" height=\"" + num(h_) + "\" viewBox=\"0 0 " + num(w_) + " " +
           num(h_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
  }

 private:
  double w_;
  double h_;
  std::string body_;
};

// Plot area mapping for one panel.
struct Frame {
  double x0, y0, w, h;
  Axis xa, ya;

  double px(double x) const { return x0 + (x - xa.lo) / (xa.hi - xa.lo) * w; }
  double py(double y) const { return y0 + h - (y - ya.lo) / (ya.hi - ya.lo) * h; }
};

void draw_y_axis(Svg& svg, const Frame& f, std::string_view label) {
  svg.line(f.x0, f.y0, f.x0, f.y0 + f.h, "black");
  const int n = static_cast<int>(std::lround((f.ya.hi - f.ya.lo) / f.ya.step));
  for (int i = 0; i <= n; ++i) {
    const double v = f.ya.lo + i * f.ya.step;
    const double y = f.py(v);
    svg.line(f.x0 - 4, y, f.x0, y, "black");
    svg.text(f.x0 - 6, y + 4, format_double(std::round(v * 1e6) / 1e6), "end", 10);
  }
  svg.text(f.x0 - 48, f.y0 + f.h / 2, label, "middle", 12, -90);
}

void draw_x_axis(Svg& svg, const Frame& f, std::string_view label) {
  svg.line(f.x0, f.y0 + f.h, f.x0 + f.w, f.y0 + f.h, "black");
  const int n = static_cast<int>(std::lround((f.xa.hi - f.xa.lo) / f.xa.step));
  for (int i = 0; i <= n; ++i) {
    const double v = f.xa.lo + i * f.xa.step;
    const double x = f.px(v);
    svg.line(x, f.y0 + f.h, x, f.y0 + f.h + 4, "black");
    svg.text(x, f.y0 + f.h + 16, format_double(std::round(v * 1e6) / 1e6), "middle", 10);
  }
  svg.text(f.x0 + f.w / 2, f.y0 + f.h + 36, label, "middle");
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

}  // namespace

std::string boxplot_svg(const std::vector<BoxGroup>& groups,
                        std::string_view title, std::string_view y_label) {
  if (groups.empty()) throw ArgumentError("box plot needs at least one group");
  std::vector<BoxStats> stats;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& g : groups) {
    stats.push_back(boxplot_stats(g.values));
    lo = std::min(lo, stats.back().outliers.empty()
                          ? stats.back().whisker_low
                          : std::min(stats.back().whisker_low,
                                     stats.back().outliers.front()));
    hi = std::max(hi, stats.back().outliers.empty()
                          ? stats.back().whisker_high
                          : std::max(stats.back().whisker_high,
                                     stats.back().outliers.back()));
  }
  Svg svg(kWidth, kHeight);
  Frame f{kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom,
          {0, static_cast<double>(groups.size()), 1}, make_axis(lo, hi)};
  svg.text(kWidth / 2, 24, title, "middle", 14);
  draw_y_axis(svg, f, y_label);
  svg.line(f.x0, f.y0 + f.h, f.x0 + f.w, f.y0 + f.h, "black");

  const double slot = f.w / static_cast<double>(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& s = stats[i];
    const char* color = kPalette[i % 4];
    const double cx = f.x0 + slot * (i + 0.5);
    const double half = std::min(40.0, slot * 0.3);
    svg.line(cx, f.py(s.whisker_low), cx, f.py(s.q1), "black");
    svg.line(cx, f.py(s.q3), cx, f.py(s.whisker_high), "black");
    svg.line(cx - half / 2, f.py(s.whisker_low), cx + half / 2,
             f.py(s.whisker_low), "black");
    svg.line(cx - half / 2, f.py(s.whisker_high), cx + half / 2,
             f.py(s.whisker_high), "black");
    svg.rect(cx - half, f.py(s.q3), 2 * half, f.py(s.q1) - f.py(s.q3), color,
             "black");
    svg.line(cx - half, f.py(s.median), cx + half, f.py(s.median), "black", 2);
    for (double o : s.outliers) svg.circle(cx, f.py(o), 3, "none", "black");
    svg.text(cx, f.y0 + f.h + 16, groups[i].label, "middle");
  }
  return svg.str();
}

std::string histogram_svg(const std::vector<Histogram>& panels,
                          std::string_view x_label) {
  if (panels.empty()) throw ArgumentError("histogram needs at least one panel");
  const double panel_h = kHeight - 20;
  Svg svg(kWidth, panel_h * static_cast<double>(panels.size()));
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& hist = panels[p];
    std::size_t peak = 0;
    for (auto c : hist.counts) peak = std::max(peak, c);
    const double top = p * panel_h + kTop;
    const double nbins = std::max<std::size_t>(hist.counts.size(), 1);
    Frame f{kLeft, top, kWidth - kLeft - kRight, panel_h - kTop - kBottom,
            make_axis(0, nbins), make_axis(0, std::max<double>(peak, 1))};
    f.xa.lo = 0;
    svg.text(kWidth / 2, top - 14, hist.title, "middle", 14);
    draw_y_axis(svg, f, "images");
    draw_x_axis(svg, f, x_label);
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
      if (hist.counts[k] == 0) continue;
      const double x0 = f.px(static_cast<double>(k));
      const double x1 = f.px(static_cast<double>(k + 1));
      const double y = f.py(static_cast<double>(hist.counts[k]));
      svg.rect(x0, y, std::max(x1 - x0, 0.5), f.y0 + f.h - y, kPalette[p % 4]);
    }
  }
  return svg.str();
}

std::string closure_curve_svg(std::span<const FitPoint> points,
                              const AsymptoticModel& model,
                              std::string_view title) {
  double tmax = 0, ylo = 0, yhi = 100;
  for (const auto& p : points) {
    tmax = std::max(tmax, p.t);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  Svg svg(kWidth, kHeight);
  Frame f{kLeft, kTop, kWidth - kLeft - kRight, kHeight - kTop - kBottom,
          make_axis(0, std::max(tmax, 1.0)), make_axis(ylo, yhi)};
  svg.text(kWidth / 2, 24, title, "middle", 14);
  draw_y_axis(svg, f, "closure (%)");
  draw_x_axis(svg, f, "weeks since first capture");
  for (const auto& p : points) svg.circle(f.px(p.t), f.py(p.y), 3, kPalette[0], "none");
  if (model.rate > 0) {
    std::vector<std::pair<double, double>> curve;
    constexpr int kSamples = 120;
    for (int i = 0; i <= kSamples; ++i) {
      const double t = f.xa.lo + (f.xa.hi - f.xa.lo) * i / kSamples;
      const double y = std::clamp(eval_model(model, t), f.ya.lo, f.ya.hi);
      curve.emplace_back(f.px(t), f.py(y));
    }
    svg.polyline(curve, kPalette[1], 2);
    svg.line(f.x0, f.py(std::clamp(model.asym, f.ya.lo, f.ya.hi)), f.x0 + f.w,
             f.py(std::clamp(model.asym, f.ya.lo, f.ya.hi)), "#999999", 1);
  }
  return svg.str();
}

}  // namespace grapeclose
