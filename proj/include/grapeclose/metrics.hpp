#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grapeclose/mask.hpp"

namespace grapeclose {

struct CountPair {
  double y = 0.0;      // ground truth
  double y_hat = 0.0;  // prediction
};

/// Mean absolute error. Throws ArgumentError on empty input.
double mae(std::span<const CountPair> pairs);
/// Root mean squared error. Throws ArgumentError on empty input.
double rmse(std::span<const CountPair> pairs);

/// Mean over classes of TP / (TP + FP + FN). Classes absent from both
/// labelings are left out of the mean.
double miou(std::span<const std::int32_t> pred, std::span<const std::int32_t> gt,
            int n_classes);

struct Detection {
  std::int64_t image_id = 0;
  std::int64_t id = 0;
  BinaryMask mask;
  double score = 0.0;
};

struct GroundTruth {
  std::int64_t image_id = 0;
  std::int64_t id = 0;
  BinaryMask mask;
};

/// Ground-truth area buckets in pixels: small < 32^2 <= medium <= 96^2 < large.
enum class AreaBucket { kAll, kSmall, kMedium, kLarge };

bool in_bucket(AreaBucket b, std::int64_t area) noexcept;

struct ApOptions {
  /// Defaults to 0.50, 0.55, ..., 0.95.
  std::vector<double> iou_thresholds = default_iou_thresholds();
  /// Per-image cap on detections considered; 0 keeps all.
  int max_detections = 0;

  static std::vector<double> default_iou_thresholds();
};

struct ApReport {
  std::vector<double> thresholds;
  /// All-area AP per threshold; absent when there is no ground truth.
  std::vector<std::optional<double>> per_threshold;
  std::optional<double> map;
  std::optional<double> ap50;
  std::optional<double> ap75;
  std::optional<double> ap_small;
  std::optional<double> ap_medium;
  std::optional<double> ap_large;
};

/// Mask AP with greedy score-ordered matching and 101-point interpolated
/// precision. Ground truths outside a size bucket are ignored for that
/// bucket; so are unmatched detections whose own area falls outside it.
ApReport average_precision(std::span<const Detection> dets,
                           std::span<const GroundTruth> gts,
                           const ApOptions& opts = {});

/// Single-threshold, single-bucket AP.
std::optional<double> average_precision_at(std::span<const Detection> dets,
                                           std::span<const GroundTruth> gts,
                                           double iou_threshold,
                                           AreaBucket bucket = AreaBucket::kAll,
                                           int max_detections = 0);

}  // namespace grapeclose
