#include "grapeclose/raster.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cctype>
#include <cstring>
#include <optional>

#include "grapeclose/error.hpp"

namespace grapeclose {

static_assert(std::endian::native == std::endian::little,
              "NPY payload decoding assumes a little-endian host");

Heatmap::Heatmap(int width, int height, std::vector<double> values,
                 int stride_factor)
    : width_(width), height_(height), stride_(stride_factor),
      values_(std::move(values)) {
  if (width <= 0 || height <= 0) {
    throw ArgumentError("heatmap dimensions must be positive");
  }
  if (stride_factor < 1) throw ArgumentError("stride factor must be >= 1");
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw ArgumentError("heatmap value count does not match width*height");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw RangeError("heatmap value outside [0, 1]");
    }
  }
}

namespace {

constexpr double kRangeSlack = 1e-6;

std::vector<double> clamp_checked(std::vector<double> values) {
  for (double& v : values) {
    if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack)) {
      throw RangeError("heatmap value " + std::to_string(v) +
                       " outside [0, 1]");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return values;
}

// Extracts the literal following `'key':` in a NPY header dict.
std::optional<std::string_view> header_field(std::string_view header,
                                             std::string_view key) {
  const std::string quoted = "'" + std::string(key) + "'";
  auto pos = header.find(quoted);
  if (pos == std::string_view::npos) return std::nullopt;
  pos = header.find(':', pos + quoted.size());
  if (pos == std::string_view::npos) return std::nullopt;
  ++pos;
  while (pos < header.size() && header[pos] == ' ') ++pos;
  std::size_t end = pos;
  if (pos < header.size() && header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string_view::npos) return std::nullopt;
    ++end;
  } else if (pos < header.size() && header[pos] == '\'') {
    end = header.find('\'', pos + 1);
    if (end == std::string_view::npos) return std::nullopt;
    ++end;
  } else {
    while (end < header.size() && header[end] != ',' && header[end] != '}') {
      ++end;
    }
  }
  return header.substr(pos, end - pos);
}

std::vector<std::size_t> parse_shape(std::string_view tuple) {
  std::vector<std::size_t> dims;
  std::size_t i = 1;  // skip '('
  while (i < tuple.size()) {
    while (i < tuple.size() && (tuple[i] == ' ' || tuple[i] == ',')) ++i;
    if (i >= tuple.size() || tuple[i] == ')') break;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tuple.data() + i,
                                     tuple.data() + tuple.size(), v);
    if (ec != std::errc{}) throw FormatError("bad NPY shape tuple");
    dims.push_back(v);
    i = static_cast<std::size_t>(ptr - tuple.data());
  }
  return dims;
}

Heatmap load_npy(std::string_view bytes) {
  if (bytes.size() < 10) throw FormatError("NPY file too short");
  if (bytes[6] != 1 || bytes[7] != 0) {
    throw FormatError("unsupported NPY version", 6);
  }
  const auto header_len = static_cast<std::size_t>(
      static_cast<unsigned char>(bytes[8]) |
      (static_cast<unsigned char>(bytes[9]) << 8));
  if (bytes.size() < 10 + header_len) {
    throw FormatError("NPY header truncated", bytes.size());
  }
  const std::string_view header = bytes.substr(10, header_len);
  const auto descr = header_field(header, "descr");
  const auto fortran = header_field(header, "fortran_order");
  const auto shape = header_field(header, "shape");
  if (!descr || !fortran || !shape) {
    throw FormatError("NPY header missing descr/fortran_order/shape", 10);
  }
  std::size_t item = 0;
  if (*descr == "'<f4'") {
    item = 4;
  } else if (*descr == "'<f8'") {
    item = 8;
  } else {
    throw FormatError("unsupported NPY dtype " + std::string(*descr));
  }
  if (*fortran != "False") {
    throw FormatError("Fortran-ordered NPY arrays are not supported");
  }
  const auto dims = parse_shape(*shape);
  if (dims.size() != 2) {
    throw FormatError("heatmap must be a 2-D array, got rank " +
                      std::to_string(dims.size()));
  }
  const std::size_t rows = dims[0];
  const std::size_t cols = dims[1];
  const std::size_t n = rows * cols;
  const std::string_view payload = bytes.substr(10 + header_len);
  if (payload.size() != n * item) {
    throw FormatError("NPY payload size does not match shape",
                      10 + header_len);
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (item == 4) {
      float f;
      std::memcpy(&f, payload.data() + i * 4, 4);
      values[i] = f;
    } else {
      std::memcpy(&values[i], payload.data() + i * 8, 8);
    }
  }
  return Heatmap(static_cast<int>(cols), static_cast<int>(rows),
                 clamp_checked(std::move(values)));
}

Heatmap load_text(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    }
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "HF") throw FormatError("unrecognized heatmap format", 0);
  auto parse_int = [&](std::string_view tok) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || v <= 0) {
      throw FormatError("bad heatmap dimension '" + std::string(tok) + "'", pos);
    }
    return v;
  };
  const int width = parse_int(next_token());
  const int height = parse_int(next_token());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(width) * height);
  for (;;) {
    const auto tok = next_token();
    if (tok.empty()) break;
    double v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw FormatError("bad heatmap value '" + std::string(tok) + "'", pos);
    }
    values.push_back(v);
  }
  if (values.size() != static_cast<std::size_t>(width) * height) {
    throw FormatError("expected " + std::to_string(width * height) +
                      " heatmap values, got " + std::to_string(values.size()));
  }
  return Heatmap(width, height, clamp_checked(std::move(values)));
}

}  // namespace

Heatmap load_heatmap(std::string_view bytes) {
  static constexpr std::string_view kMagic = "\x93NUMPY";
  if (bytes.substr(0, kMagic.size()) == kMagic) return load_npy(bytes);
  return load_text(bytes);
}

std::string save_npy(const Heatmap& h, NpyDtype dtype) {
  const bool f4 = dtype == NpyDtype::kFloat32;
  std::string header = std::string("{'descr': '") + (f4 ? "<f4" : "<f8") +
                       "', 'fortran_order': False, 'shape': (" +
                       std::to_string(h.height()) + ", " +
                       std::to_string(h.width()) + "), }";
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::string out = "\x93NUMPY";
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header.size() & 0xff));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xff));
  out += header;
  for (double v : h.values()) {
    if (f4) {
      const float f = static_cast<float>(v);
      out.append(reinterpret_cast<const char*>(&f), 4);
    } else {
      out.append(reinterpret_cast<const char*>(&v), 8);
    }
  }
  return out;
}

namespace {

struct Tap {
  int i0;
  int i1;
  double w;
};

std::vector<Tap> taps(int in, int factor) {
  std::vector<Tap> out(static_cast<std::size_t>(in) * factor);
  for (int o = 0; o < in * factor; ++o) {
    double src = (o + 0.5) / factor - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int i0 = static_cast<int>(std::floor(src));
    const int i1 = std::min(i0 + 1, in - 1);
    out[o] = {i0, i1, src - i0};
  }
  return out;
}

double lerp_bounded(double a, double b, double w) {
  const double v = a + w * (b - a);
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

}  // namespace

Heatmap upsample_bilinear(const Heatmap& h, int factor) {
  if (factor < 1) throw ArgumentError("upsample factor must be >= 1");
  if (factor == 1) return h;
  const int ow = h.width() * factor;
  const int oh = h.height() * factor;
  const auto tx = taps(h.width(), factor);
  const auto ty = taps(h.height(), factor);
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    const Tap& r = ty[y];
    for (int x = 0; x < ow; ++x) {
      const Tap& c = tx[x];
      const double top = lerp_bounded(h.at(c.i0, r.i0), h.at(c.i1, r.i0), c.w);
      const double bot = lerp_bounded(h.at(c.i0, r.i1), h.at(c.i1, r.i1), c.w);
      out[static_cast<std::size_t>(y) * ow + x] = lerp_bounded(top, bot, r.w);
    }
  }
  const int stride = h.stride_factor() % factor == 0
                         ? h.stride_factor() / factor
                         : 1;
  return Heatmap(ow, oh, std::move(out), stride);
}

std::vector<KeyPoint> extract_keypoints(const Heatmap& h, double tau,
                                        int top_k) {
  if (!(tau >= 0.0 && tau < 1.0)) throw ArgumentError("tau must be in [0, 1)");
  if (top_k < 1) throw ArgumentError("top_k must be >= 1");
  const int w = h.width();
  const int ht = h.height();

  // Separable 3x3 max filter with windows truncated at the borders.
  std::vector<double> row_max(static_cast<std::size_t>(w) * ht);
  for (int y = 0; y < ht; ++y) {
    for (int x = 0; x < w; ++x) {
      double m = h.at(x, y);
      if (x > 0) m = std::max(m, h.at(x - 1, y));
      if (x + 1 < w) m = std::max(m, h.at(x + 1, y));
      row_max[static_cast<std::size_t>(y) * w + x] = m;
    }
  }
  std::vector<KeyPoint> points;
  for (int y = 0; y < ht; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = h.at(x, y);
      if (!(v > tau)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double m = row_max[i];
      if (y > 0) m = std::max(m, row_max[i - w]);
      if (y + 1 < ht) m = std::max(m, row_max[i + w]);
      if (v >= m) points.push_back({x, y, v});
    }
  }
  std::sort(points.begin(), points.end(),
            [](const KeyPoint& a, const KeyPoint& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.y != b.y) return a.y < b.y;
              return a.x < b.x;
            });
  if (points.size() > static_cast<std::size_t>(top_k)) points.resize(top_k);
  return points;
}

}  // namespace grapeclose
