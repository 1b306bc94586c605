#include "grapeclose/maskops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grapeclose/error.hpp"

namespace grapeclose {

MaskSet::MaskSet(std::vector<BinaryMask> masks) : masks_(std::move(masks)) {
  if (!masks_.empty()) {
    width_ = masks_.front().width();
    height_ = masks_.front().height();
  }
  areas_.reserve(masks_.size());
  for (const auto& m : masks_) {
    if (m.width() != width_ || m.height() != height_) {
      throw ArgumentError("all masks in a mask set must share one size");
    }
    areas_.push_back(m.area());
  }
}

MaskSet MaskSet::select(std::span<const std::size_t> indices) const {
  MaskSet out;
  out.width_ = width_;
  out.height_ = height_;
  for (auto i : indices) {
    out.masks_.push_back(masks_.at(i));
    out.areas_.push_back(areas_.at(i));
  }
  return out;
}

PercentileMethod parse_percentile_method(std::string_view name) {
  if (name == "linear") return PercentileMethod::kLinear;
  if (name == "lower") return PercentileMethod::kLower;
  if (name == "higher") return PercentileMethod::kHigher;
  if (name == "nearest") return PercentileMethod::kNearest;
  if (name == "midpoint") return PercentileMethod::kMidpoint;
  throw ArgumentError("unknown percentile method '" + std::string(name) + "'");
}

std::string_view to_string(PercentileMethod m) {
  switch (m) {
    case PercentileMethod::kLinear: return "linear";
    case PercentileMethod::kLower: return "lower";
    case PercentileMethod::kHigher: return "higher";
    case PercentileMethod::kNearest: return "nearest";
    case PercentileMethod::kMidpoint: return "midpoint";
  }
  return "linear";
}

double percentile_sorted(std::span<const double> sorted, double p,
                         PercentileMethod method) {
  if (sorted.empty()) throw ArgumentError("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 100.0)) throw ArgumentError("percentile outside [0, 100]");
  const double h = (p / 100.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double t = h - static_cast<double>(lo);
  const double a = sorted[lo];
  const double b = sorted[hi];
  switch (method) {
    case PercentileMethod::kLinear: {
      // Same two-sided form numpy uses, exact at both ends.
      const double d = b - a;
      return t < 0.5 ? a + d * t : b - d * (1.0 - t);
    }
    case PercentileMethod::kLower:
      return a;
    case PercentileMethod::kHigher:
      return t > 0.0 ? b : a;
    case PercentileMethod::kNearest:
      return sorted[static_cast<std::size_t>(std::nearbyint(h))];
    case PercentileMethod::kMidpoint:
      return t > 0.0 ? 0.5 * (a + b) : a;
  }
  return a;
}

std::int64_t mask_area(const BinaryMask& m) { return m.area(); }

std::vector<std::size_t> iqr_keep_indices(std::span<const std::int64_t> areas,
                                          const IqrOptions& opts) {
  const std::size_t n = areas.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (n == 0) return all;

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    logs[i] = std::log(static_cast<double>(areas[i]) + opts.epsilon);
  }
  const auto [mn_it, mx_it] = std::minmax_element(logs.begin(), logs.end());
  const double mn = *mn_it;
  const double mx = *mx_it;
  if (mx == mn) return all;

  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) norm[i] = (logs[i] - mn) / (mx - mn);
  std::vector<double> sorted = norm;
  std::sort(sorted.begin(), sorted.end());
  const double q1 = percentile_sorted(sorted, 25.0, opts.method);
  const double q3 = percentile_sorted(sorted, 75.0, opts.method);
  const double iqr = q3 - q1;
  const double lo = q1 - opts.multiplier * iqr;
  const double hi = q3 + opts.multiplier * iqr;

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (lo <= norm[i] && norm[i] <= hi) keep.push_back(i);
  }
  return keep;
}

MaskSet filter_masks_iqr(const MaskSet& ms, const IqrOptions& opts) {
  const auto keep = iqr_keep_indices(ms.areas(), opts);
  return ms.select(keep);
}

std::int64_t union_area(const MaskSet& ms) {
  if (ms.empty()) return 0;
  std::vector<std::uint8_t> acc(ms[0].size(), 0);
  for (const auto& m : ms.masks()) {
    const auto d = m.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] |= d[i];
  }
  return std::count(acc.begin(), acc.end(), std::uint8_t{1});
}

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw ArgumentError("mask sizes differ");
  const auto da = a.data();
  const auto db = b.data();
  std::int64_t n = 0;
  for (std::size_t i = 0; i < da.size(); ++i) n += da[i] & db[i];
  return n;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw ArgumentError("mask sizes differ");
  const auto da = a.data();
  const auto db = b.data();
  std::int64_t inter = 0;
  std::int64_t uni = 0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    inter += da[i] & db[i];
    uni += da[i] | db[i];
  }
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace grapeclose
