#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grapeclose/mask.hpp"
#include "grapeclose/maskops.hpp"

namespace grapeclose {

inline constexpr std::string_view kClusterCategory = "cluster";
inline constexpr std::string_view kBerryCategory = "berry";

/// Instance annotation with a segmentation (cluster masks, and berry masks
/// when a producer emits them). Polygons are rasterized at parse time.
struct ClusterAnnotation {
  std::int64_t id = 0;
  Rle mask;
  BBox bbox;
  std::int64_t area = 0;
  /// Present on prediction files.
  std::optional<double> score;
  /// Original polygon rings, empty when the source was an RLE.
  std::vector<std::vector<double>> polygons;

  BinaryMask decode() const { return rle_decode(mask); }
};

struct BerryPoint {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<std::int64_t> cluster_id;
  std::optional<double> score;
};

struct ImageRecord {
  std::int64_t id = 0;
  int width = 0;
  int height = 0;
  std::string file_name;
  /// Weeks since first capture; optional `capture_time_weeks` image key.
  std::optional<double> capture_time_weeks;
  std::vector<ClusterAnnotation> clusters;
  std::vector<BerryPoint> berries;
  std::vector<ClusterAnnotation> berry_masks;
};

/// Parsed corpus. Images are kept sorted by id; immutable once built.
class DatasetIndex {
 public:
  DatasetIndex() = default;
  DatasetIndex(std::vector<ImageRecord> images,
               std::map<std::int64_t, std::string> categories);

  const std::vector<ImageRecord>& images() const noexcept { return images_; }
  const std::map<std::int64_t, std::string>& categories() const noexcept {
    return categories_;
  }
  const ImageRecord* find(std::int64_t image_id) const noexcept;

  std::size_t cluster_count() const noexcept;
  std::size_t berry_count() const noexcept;

 private:
  std::vector<ImageRecord> images_;
  std::map<std::int64_t, std::string> categories_;
};

/// Parses and validates a COCO-flavored annotation document.
/// Throws FormatError (with byte offset) on malformed JSON or schema shape,
/// ValidationError listing every violation otherwise.
DatasetIndex parse_dataset(std::string_view json_bytes);

struct CsvPoint {
  std::int64_t image_id = 0;
  double x = 0.0;
  double y = 0.0;
};

/// `image_id,x,y` with header. Throws FormatError.
std::vector<CsvPoint> parse_points_csv(std::string_view text);

/// Returns a copy of `ds` with the CSV points appended as berry points.
/// Throws ValidationError for unknown image ids or out-of-bounds points.
DatasetIndex merge_points(const DatasetIndex& ds,
                          const std::vector<CsvPoint>& points);

struct DatasetStats {
  std::size_t image_count = 0;
  /// histogram[c] = number of images with exactly c instances.
  std::vector<std::size_t> cluster_histogram;
  std::vector<std::size_t> berry_histogram;
  std::optional<double> mean_clusters;
  std::optional<double> median_clusters;
  std::optional<double> mean_berries;
  std::optional<double> median_berries;
};

/// Berry counts include both point and mask berry annotations.
DatasetStats dataset_stats(const DatasetIndex& ds);

/// Mask set interchange: a JSON array of RLE objects
/// {"size": [h, w], "counts": [..] | "string"}. Throws FormatError.
MaskSet parse_mask_set(std::string_view json_bytes);
std::string write_mask_set(const MaskSet& ms, bool compressed = true);

}  // namespace grapeclose
