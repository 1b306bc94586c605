#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "grapeclose/mask.hpp"

namespace grapeclose {

/// Masks of one shared size, with areas computed once at construction.
class MaskSet {
 public:
  MaskSet() = default;
  explicit MaskSet(std::vector<BinaryMask> masks);

  std::size_t size() const noexcept { return masks_.size(); }
  bool empty() const noexcept { return masks_.empty(); }
  const BinaryMask& operator[](std::size_t i) const { return masks_[i]; }
  const std::vector<BinaryMask>& masks() const noexcept { return masks_; }
  std::span<const std::int64_t> areas() const noexcept { return areas_; }

  /// Zero while the set is empty.
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// Order-preserving subset.
  MaskSet select(std::span<const std::size_t> indices) const;

 private:
  std::vector<BinaryMask> masks_;
  std::vector<std::int64_t> areas_;
  int width_ = 0;
  int height_ = 0;
};

enum class PercentileMethod { kLinear, kLower, kHigher, kNearest, kMidpoint };

PercentileMethod parse_percentile_method(std::string_view name);
std::string_view to_string(PercentileMethod m);

/// Percentile of already-sorted data, p in [0, 100], numpy conventions.
double percentile_sorted(std::span<const double> sorted, double p,
                         PercentileMethod method = PercentileMethod::kLinear);

struct IqrOptions {
  double multiplier = 1.5;
  double epsilon = 1e-9;
  PercentileMethod method = PercentileMethod::kLinear;
};

std::int64_t mask_area(const BinaryMask& m);

/// Indices (ascending) kept by the log-area IQR filter.
std::vector<std::size_t> iqr_keep_indices(std::span<const std::int64_t> areas,
                                          const IqrOptions& opts = {});

MaskSet filter_masks_iqr(const MaskSet& ms, const IqrOptions& opts = {});

/// Pixel count of the OR of all masks.
std::int64_t union_area(const MaskSet& ms);

/// |a & b| / |a | b|; 0 when both are empty. Throws ArgumentError on a
/// size mismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

std::int64_t intersection_area(const BinaryMask& a, const BinaryMask& b);

}  // namespace grapeclose
