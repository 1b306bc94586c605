#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grapeclose/mask.hpp"
#include "grapeclose/maskops.hpp"

namespace grapeclose {

/// kClipped: numerator is the union of berry pixels inside the cluster, so
/// the closure never exceeds 100. kLiteral: plain sum of berry areas.
enum class ClosureMode { kClipped, kLiteral };

/// Whether the IQR filter runs over all berries of an image or separately
/// over the berries assigned to each cluster.
enum class IqrScope { kImage, kCluster };

/// Per-image closure: unweighted mean of cluster closures, or pooled pixels.
enum class Aggregation { kClusterMean, kPooled };

ClosureMode parse_closure_mode(std::string_view s);
std::string_view to_string(ClosureMode m);
IqrScope parse_iqr_scope(std::string_view s);
std::string_view to_string(IqrScope s);
Aggregation parse_aggregation(std::string_view s);
std::string_view to_string(Aggregation a);

struct ClusterMask {
  std::int64_t id = 0;
  BinaryMask mask;
};

struct BerryAssignment {
  /// Berry indices per cluster id, ascending. Every cluster has an entry.
  std::map<std::int64_t, std::vector<std::size_t>> indices;
  /// Berries that overlap no cluster.
  std::size_t dropped = 0;

  MaskSet masks_for(std::int64_t cluster_id, const MaskSet& berries) const;
};

/// Each berry goes to the cluster it overlaps most; ties go to the lower
/// cluster id.
BerryAssignment assign_berries_to_clusters(const MaskSet& berries,
                                           std::span<const ClusterMask> clusters);

/// Closure percentage of one cluster. Throws EmptyMaskError for an empty
/// cluster and ArgumentError on a size mismatch.
double vcc(const MaskSet& berries, const BinaryMask& cluster,
           ClosureMode mode = ClosureMode::kClipped);

/// Berry pixel count entering the closure numerator.
std::int64_t berry_pixels(const MaskSet& berries, const BinaryMask& cluster,
                          ClosureMode mode);

struct ClosureRecord {
  std::int64_t image_id = 0;
  std::int64_t cluster_id = 0;
  std::int64_t berry_pixels = 0;
  std::int64_t cluster_pixels = 0;
  double vcc = 0.0;
  double capture_time = 0.0;

  friend bool operator==(const ClosureRecord&, const ClosureRecord&) = default;
};

struct ClosureOptions {
  ClosureMode mode = ClosureMode::kClipped;
  std::optional<IqrOptions> iqr;
  IqrScope iqr_scope = IqrScope::kImage;
};

struct ImageClosure {
  std::vector<ClosureRecord> records;  // sorted by cluster id
  std::size_t berries_in = 0;
  std::size_t berries_filtered = 0;  // removed by the IQR filter
  std::size_t berries_dropped = 0;   // overlapping no cluster
};

/// Filter (optional), assign, and score every cluster of one image.
ImageClosure image_closure(std::int64_t image_id, double capture_time,
                           std::span<const ClusterMask> clusters,
                           const MaskSet& berries, const ClosureOptions& opts);

/// Per-image closure from that image's records.
double image_vcc(std::span<const ClosureRecord> records,
                 Aggregation agg = Aggregation::kClusterMean);

struct SeriesPoint {
  double time = 0.0;
  double mean_vcc = 0.0;
  /// Per-cluster closures at this time, ordered by (image id, cluster id).
  std::vector<double> values;
};

struct ClosureSeries {
  std::vector<SeriesPoint> points;  // strictly increasing time
};

/// Groups records by capture time. Throws ValidationError on a repeated
/// (image, cluster, time) triple.
ClosureSeries build_series(std::span<const ClosureRecord> records,
                           Aggregation agg = Aggregation::kClusterMean);

inline constexpr std::string_view kClosureCsvHeader =
    "image_id,cluster_id,capture_time_weeks,berry_pixels,cluster_pixels,"
    "vcc_percent";

std::string write_closure_csv(std::span<const ClosureRecord> records);
/// Throws FormatError.
std::vector<ClosureRecord> read_closure_csv(std::string_view text);

}  // namespace grapeclose
