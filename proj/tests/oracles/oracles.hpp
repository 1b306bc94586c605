// Brute-force reference implementations used only by the tests. Each one is
// written independently of the library code path it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "grapeclose/mask.hpp"
#include "grapeclose/metrics.hpp"
#include "grapeclose/raster.hpp"

namespace oracle {

using grapeclose::BinaryMask;

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  std::bernoulli_distribution bit(density);
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, bit(rng));
  return m;
}

inline BinaryMask disc(int w, int h, double cx, double cy, double r) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      if (dx * dx + dy * dy <= r * r) m.set(x, y);
    }
  return m;
}

inline BinaryMask rect(int w, int h, int x0, int y0, int rw, int rh) {
  BinaryMask m(w, h);
  for (int y = y0; y < y0 + rh; ++y)
    for (int x = x0; x < x0 + rw; ++x) m.set(x, y);
  return m;
}

/// Column-major flatten, then count maximal runs starting from zeros.
inline std::vector<std::uint32_t> runs(const BinaryMask& m) {
  std::vector<int> flat;
  for (int x = 0; x < m.width(); ++x)
    for (int y = 0; y < m.height(); ++y) flat.push_back(m.at(x, y) ? 1 : 0);
  std::vector<std::uint32_t> counts;
  if (flat.empty()) return counts;
  int want = 0;
  std::size_t i = 0;
  while (i < flat.size()) {
    std::uint32_t n = 0;
    while (i < flat.size() && flat[i] == want) {
      ++n;
      ++i;
    }
    counts.push_back(n);
    want ^= 1;
  }
  return counts;
}

/// Crossing-number test at a single point.
inline bool inside(const std::vector<grapeclose::Point2d>& poly, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > py) != (b.y > py) &&
        px < (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x) {
      in = !in;
    }
  }
  return in;
}

inline BinaryMask rasterize(const std::vector<grapeclose::Point2d>& poly, int w, int h) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, inside(poly, x + 0.5, y + 0.5));
  return m;
}

/// Full 3x3 neighbourhood comparison per cell, then a tuple sort.
inline std::vector<grapeclose::KeyPoint> keypoints(const grapeclose::Heatmap& h,
                                                   double tau, int k) {
  std::vector<std::tuple<double, int, int>> found;
  for (int y = 0; y < h.height(); ++y) {
    for (int x = 0; x < h.width(); ++x) {
      const double v = h.at(x, y);
      if (!(v > tau)) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= h.width() || ny >= h.height()) continue;
          if (h.at(nx, ny) > v) {
            is_max = false;
            break;
          }
        }
      if (is_max) found.emplace_back(-v, y, x);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<grapeclose::KeyPoint> out;
  for (const auto& [neg, y, x] : found) {
    if (static_cast<int>(out.size()) == k) break;
    out.push_back({x, y, -neg});
  }
  return out;
}

/// Log, min-max normalize, interpolated quartiles, inclusive 1.5 IQR fences.
inline std::vector<std::size_t> iqr_filter(const std::vector<std::int64_t>& areas,
                                           double multiplier = 1.5) {
  const std::size_t n = areas.size();
  std::vector<std::size_t> keep;
  if (n == 0) return keep;
  std::vector<double> l;
  for (auto a : areas) l.push_back(std::log(static_cast<double>(a) + 1e-9));
  const double lo = *std::min_element(l.begin(), l.end());
  const double hi = *std::max_element(l.begin(), l.end());
  if (lo == hi) {
    for (std::size_t i = 0; i < n; ++i) keep.push_back(i);
    return keep;
  }
  std::vector<double> z;
  for (double v : l) z.push_back((v - lo) / (hi - lo));
  std::vector<double> s = z;
  std::sort(s.begin(), s.end());
  auto pct = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t below = static_cast<std::size_t>(pos);
    if (below + 1 >= n) return s[n - 1];
    const double frac = pos - static_cast<double>(below);
    const double gap = s[below + 1] - s[below];
    if (frac >= 0.5) return s[below + 1] - gap * (1.0 - frac);
    return s[below] + gap * frac;
  };
  const double q1 = pct(0.25), q3 = pct(0.75);
  const double spread = q3 - q1;
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] >= q1 - multiplier * spread && z[i] <= q3 + multiplier * spread) {
      keep.push_back(i);
    }
  }
  return keep;
}

inline double iou(const BinaryMask& a, const BinaryMask& b) {
  int inter = 0, uni = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      inter += a.at(x, y) && b.at(x, y);
      uni += a.at(x, y) || b.at(x, y);
    }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

/// Greedy matching enumerated per image, then the interpolated PR curve
/// integrated directly: for each recall level r, the best precision among
/// all PR points with recall >= r.
inline std::optional<double> average_precision(
    const std::vector<grapeclose::Detection>& dets,
    const std::vector<grapeclose::GroundTruth>& gts, double threshold) {
  if (gts.empty()) return std::nullopt;
  struct Hit {
    double score;
    std::int64_t image;
    std::int64_t id;
    bool tp;
  };
  std::vector<Hit> hits;
  std::map<std::int64_t, std::vector<const grapeclose::Detection*>> det_by_image;
  for (const auto& d : dets) det_by_image[d.image_id].push_back(&d);
  for (auto& [img, list] : det_by_image) {
    std::sort(list.begin(), list.end(), [](auto* a, auto* b) {
      return a->score > b->score || (a->score == b->score && a->id < b->id);
    });
    std::vector<const grapeclose::GroundTruth*> g;
    for (const auto& gt : gts)
      if (gt.image_id == img) g.push_back(&gt);
    std::vector<bool> taken(g.size(), false);
    for (const auto* d : list) {
      int best = -1;
      double best_iou = -1.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (taken[j]) continue;
        const double v = iou(d->mask, g[j]->mask);
        if (v >= threshold && v > best_iou) {
          best_iou = v;
          best = static_cast<int>(j);
        }
      }
      if (best >= 0) taken[best] = true;
      hits.push_back({d->score, d->image_id, d->id, best >= 0});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::tie(b.score, a.image, a.id) < std::tie(a.score, b.image, b.id);
  });
  std::vector<std::pair<double, double>> pr;  // (recall, precision)
  int tp = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    tp += hits[i].tp;
    pr.emplace_back(static_cast<double>(tp) / gts.size(),
                    static_cast<double>(tp) / static_cast<double>(i + 1));
  }
  double total = 0.0;
  for (int r = 0; r <= 100; ++r) {
    const double level = r / 100.0;
    double best = 0.0;
    for (const auto& [rec, prec] : pr)
      if (rec >= level) best = std::max(best, prec);
    total += best;
  }
  return total / 101.0;
}

/// Full confusion matrix, IoU per class from row/column sums.
inline double miou(const std::vector<std::int32_t>& pred,
                   const std::vector<std::int32_t>& gt, int n) {
  std::vector<std::vector<long>> c(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < pred.size(); ++i) ++c[gt[i]][pred[i]];
  double sum = 0;
  int classes = 0;
  for (int k = 0; k < n; ++k) {
    long row = 0, col = 0;
    for (int j = 0; j < n; ++j) {
      row += c[k][j];
      col += c[j][k];
    }
    const long denom = row + col - c[k][k];
    if (denom == 0) continue;
    sum += static_cast<double>(c[k][k]) / denom;
    ++classes;
  }
  return sum / classes;
}

}  // namespace oracle
