#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grapeclose {

/// Dense binary raster, row-major, one byte per pixel (0 or 1).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);
  /// `data` must hold width*height entries; nonzero entries are stored as 1.
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  bool at(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool value = true) noexcept {
    data_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }

  /// Number of set pixels.
  std::int64_t area() const noexcept;
  bool none() const noexcept { return area() == 0; }

  bool same_shape(const BinaryMask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// COCO-style run-length encoding: column-major runs alternating
/// zeros/ones, starting with a (possibly empty) run of zeros.
struct Rle {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const Rle&, const Rle&) = default;
};

struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Point2d {
  double x = 0.0;
  double y = 0.0;
};

/// Canonical encoding: no zero-length interior runs.
Rle rle_encode(const BinaryMask& mask);

/// Throws FormatError when the run lengths do not sum to height*width.
BinaryMask rle_decode(const Rle& rle);

/// Sum of the odd-indexed (foreground) runs.
std::int64_t rle_area(const Rle& rle);

/// cocoapi compressed-string codec: 6-bit little-endian groups with a
/// continuation bit, sign-folded, and counts past index 2 stored as deltas
/// against the count two positions earlier. Output alphabet is '0'..'o'.
std::string rle_compress(std::span<const std::uint32_t> counts);
std::string rle_compress(const Rle& rle);

std::vector<std::uint32_t> rle_decompress_counts(std::string_view encoded);
/// Decodes and checks the count sum against the given size.
Rle rle_decompress(std::string_view encoded, int height, int width);

/// Even-odd fill sampled at pixel centers (x + 0.5, y + 0.5).
BinaryMask polygon_to_mask(std::span<const Point2d> polygon, int width,
                           int height);

/// COCO polygon list: each entry is a flat [x0, y0, x1, y1, ...] ring.
/// Rings are rasterized independently and unioned.
BinaryMask polygons_to_mask(const std::vector<std::vector<double>>& rings,
                            int width, int height);

/// Tight axis-aligned box of the set pixels. Throws EmptyMaskError.
BBox mask_to_bbox(const BinaryMask& mask);

}  // namespace grapeclose
