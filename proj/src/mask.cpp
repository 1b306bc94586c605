#include "grapeclose/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "grapeclose/error.hpp"

namespace grapeclose {

namespace {

void check_dims(int width, int height) {
  if (width < 0 || height < 0) {
    throw ArgumentError("mask dimensions must be nonnegative");
  }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw ArgumentError("mask data size does not match width*height");
  }
  for (auto& v : data_) v = v != 0 ? 1 : 0;
}

std::int64_t BinaryMask::area() const noexcept {
  return std::count(data_.begin(), data_.end(), std::uint8_t{1});
}

Rle rle_encode(const BinaryMask& mask) {
  Rle rle{mask.height(), mask.width(), {}};
  const auto total = static_cast<std::size_t>(mask.width()) * mask.height();
  if (total == 0) return rle;

  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) {
      const std::uint8_t v = mask.at(x, y) ? 1 : 0;
      if (v != current) {
        rle.counts.push_back(run);
        run = 0;
        current = v;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

std::int64_t rle_area(const Rle& rle) {
  std::int64_t area = 0;
  for (std::size_t i = 1; i < rle.counts.size(); i += 2) area += rle.counts[i];
  return area;
}

BinaryMask rle_decode(const Rle& rle) {
  if (rle.height < 0 || rle.width < 0) {
    throw FormatError("RLE size must be nonnegative");
  }
  const auto total = static_cast<std::uint64_t>(rle.height) * rle.width;
  const std::uint64_t sum = std::accumulate(
      rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
  if (sum != total) {
    throw FormatError("RLE counts sum to " + std::to_string(sum) +
                      ", expected " + std::to_string(total));
  }
  BinaryMask mask(rle.width, rle.height);
  std::uint64_t pos = 0;
  bool value = false;
  for (const auto run : rle.counts) {
    if (value) {
      for (std::uint64_t p = pos; p < pos + run; ++p) {
        const int x = static_cast<int>(p / rle.height);
        const int y = static_cast<int>(p % rle.height);
        mask.set(x, y);
      }
    }
    pos += run;
    value = !value;
  }
  return mask;
}

std::string rle_compress(std::span<const std::uint32_t> counts) {
  std::string out;
  out.reserve(counts.size() * 2);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t x = counts[i];
    if (i > 2) x -= static_cast<std::int64_t>(counts[i - 2]);
    bool more = true;
    while (more) {
      auto c = static_cast<char>(x & 0x1f);
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      out.push_back(static_cast<char>(c + 48));
    }
  }
  return out;
}

std::string rle_compress(const Rle& rle) { return rle_compress(rle.counts); }

std::vector<std::uint32_t> rle_decompress_counts(std::string_view encoded) {
  std::vector<std::uint32_t> counts;
  std::size_t p = 0;
  while (p < encoded.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= encoded.size()) {
        throw FormatError("truncated RLE string", p);
      }
      const int raw = static_cast<unsigned char>(encoded[p]);
      if (raw < 48 || raw > 111) {
        throw FormatError("character outside RLE alphabet", p);
      }
      if (k >= 12) throw FormatError("RLE group too long", p);
      const int c = raw - 48;
      x |= static_cast<std::int64_t>(c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= ~std::int64_t{0} << (5 * k);
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    if (x < 0 || x > static_cast<std::int64_t>(UINT32_MAX)) {
      throw FormatError("RLE count out of range", p);
    }
    counts.push_back(static_cast<std::uint32_t>(x));
  }
  return counts;
}

Rle rle_decompress(std::string_view encoded, int height, int width) {
  Rle rle{height, width, rle_decompress_counts(encoded)};
  const std::uint64_t sum = std::accumulate(
      rle.counts.begin(), rle.counts.end(), std::uint64_t{0});
  if (height < 0 || width < 0 ||
      sum != static_cast<std::uint64_t>(height) * width) {
    throw FormatError("RLE counts do not match size");
  }
  return rle;
}

BinaryMask polygon_to_mask(std::span<const Point2d> polygon, int width,
                           int height) {
  if (polygon.size() < 3) {
    throw ArgumentError("polygon needs at least 3 vertices");
  }
  BinaryMask mask(width, height);
  const std::size_t n = polygon.size();
  std::vector<double> xs;
  for (int row = 0; row < height; ++row) {
    const double yc = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2d& a = polygon[i];
      const Point2d& b = polygon[j];
      if ((a.y > yc) != (b.y > yc)) {
        xs.push_back((b.x - a.x) * (yc - a.y) / (b.y - a.y) + a.x);
      }
    }
    std::sort(xs.begin(), xs.end());
    // A center is inside iff an odd number of crossings lie strictly to its
    // right, i.e. xs[2i] <= xc < xs[2i+1].
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const double lo = xs[i];
      const double hi = xs[i + 1];
      int col = std::max(0, static_cast<int>(std::floor(lo - 0.5)));
      while (col < width && col + 0.5 < lo) ++col;
      for (; col < width && col + 0.5 < hi; ++col) mask.set(col, row);
    }
  }
  return mask;
}

BinaryMask polygons_to_mask(const std::vector<std::vector<double>>& rings,
                            int width, int height) {
  BinaryMask out(width, height);
  std::vector<Point2d> pts;
  for (const auto& ring : rings) {
    if (ring.size() % 2 != 0) {
      throw ArgumentError("polygon ring has an odd number of coordinates");
    }
    pts.clear();
    for (std::size_t i = 0; i < ring.size(); i += 2) {
      pts.push_back({ring[i], ring[i + 1]});
    }
    const BinaryMask part = polygon_to_mask(pts, width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (part.at(x, y)) out.set(x, y);
      }
    }
  }
  return out;
}

BBox mask_to_bbox(const BinaryMask& mask) {
  int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) throw EmptyMaskError("bounding box of an empty mask");
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace grapeclose
