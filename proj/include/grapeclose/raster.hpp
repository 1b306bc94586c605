#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grapeclose {

/// Dense localization scores in [0, 1], row-major.
class Heatmap {
 public:
  Heatmap() = default;
  Heatmap(int width, int height, std::vector<double> values,
          int stride_factor = 1);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int stride_factor() const noexcept { return stride_; }
  double at(int x, int y) const noexcept {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int stride_ = 1;
  std::vector<double> values_;
};

struct KeyPoint {
  int x = 0;
  int y = 0;
  double score = 0.0;

  friend bool operator==(const KeyPoint&, const KeyPoint&) = default;
};

enum class NpyDtype { kFloat32, kFloat64 };

/// Accepts NPY v1.0 ('<f4' or '<f8', C order, rank 2) or the text form
/// `HF <width> <height>` followed by width*height decimals. Values within
/// 1e-6 of [0, 1] are clamped; anything further out raises RangeError.
Heatmap load_heatmap(std::string_view bytes);

std::string save_npy(const Heatmap& h, NpyDtype dtype = NpyDtype::kFloat64);

/// Half-pixel aligned bilinear resampling with border clamping.
Heatmap upsample_bilinear(const Heatmap& h, int factor);

/// 3x3 local-maximum decoding. A cell is kept iff its value exceeds `tau`
/// and is >= every neighbour (window truncated at borders). Output is sorted
/// by (score desc, y asc, x asc) and cut to `top_k`.
std::vector<KeyPoint> extract_keypoints(const Heatmap& h, double tau = 0.05,
                                        int top_k = 1024);

}  // namespace grapeclose
