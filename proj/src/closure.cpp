#include "grapeclose/closure.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>

#include "grapeclose/error.hpp"
#include "grapeclose/format.hpp"

namespace grapeclose {

ClosureMode parse_closure_mode(std::string_view s) {
  if (s == "clipped") return ClosureMode::kClipped;
  if (s == "literal") return ClosureMode::kLiteral;
  throw ArgumentError("closure mode must be 'clipped' or 'literal'");
}

std::string_view to_string(ClosureMode m) {
  return m == ClosureMode::kClipped ? "clipped" : "literal";
}

IqrScope parse_iqr_scope(std::string_view s) {
  if (s == "image") return IqrScope::kImage;
  if (s == "cluster") return IqrScope::kCluster;
  throw ArgumentError("IQR scope must be 'image' or 'cluster'");
}

std::string_view to_string(IqrScope s) {
  return s == IqrScope::kImage ? "image" : "cluster";
}

Aggregation parse_aggregation(std::string_view s) {
  if (s == "cluster-mean") return Aggregation::kClusterMean;
  if (s == "pooled") return Aggregation::kPooled;
  throw ArgumentError("aggregation must be 'cluster-mean' or 'pooled'");
}

std::string_view to_string(Aggregation a) {
  return a == Aggregation::kClusterMean ? "cluster-mean" : "pooled";
}

MaskSet BerryAssignment::masks_for(std::int64_t cluster_id,
                                   const MaskSet& berries) const {
  auto it = indices.find(cluster_id);
  if (it == indices.end()) return berries.select({});
  return berries.select(it->second);
}

BerryAssignment assign_berries_to_clusters(
    const MaskSet& berries, std::span<const ClusterMask> clusters) {
  std::vector<const ClusterMask*> order;
  for (const auto& c : clusters) order.push_back(&c);
  std::sort(order.begin(), order.end(),
            [](const ClusterMask* a, const ClusterMask* b) { return a->id < b->id; });

  BerryAssignment out;
  for (const auto* c : order) out.indices[c->id];
  for (std::size_t b = 0; b < berries.size(); ++b) {
    std::int64_t best_overlap = 0;
    const ClusterMask* best = nullptr;
    for (const auto* c : order) {
      const auto overlap = intersection_area(berries[b], c->mask);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = c;
      }
    }
    if (best == nullptr) {
      ++out.dropped;
    } else {
      out.indices[best->id].push_back(b);
    }
  }
  return out;
}

std::int64_t berry_pixels(const MaskSet& berries, const BinaryMask& cluster,
                          ClosureMode mode) {
  if (!berries.empty() && (berries.width() != cluster.width() ||
                           berries.height() != cluster.height())) {
    throw ArgumentError("berry and cluster mask sizes differ");
  }
  if (mode == ClosureMode::kLiteral) {
    std::int64_t sum = 0;
    for (auto a : berries.areas()) sum += a;
    return sum;
  }
  const auto c = cluster.data();
  std::vector<std::uint8_t> covered(c.size(), 0);
  for (const auto& m : berries.masks()) {
    const auto d = m.data();
    for (std::size_t i = 0; i < covered.size(); ++i) covered[i] |= d[i] & c[i];
  }
  return std::count(covered.begin(), covered.end(), std::uint8_t{1});
}

double vcc(const MaskSet& berries, const BinaryMask& cluster, ClosureMode mode) {
  const auto cluster_px = cluster.area();
  if (cluster_px == 0) throw EmptyMaskError("closure of an empty cluster mask");
  return 100.0 * static_cast<double>(berry_pixels(berries, cluster, mode)) /
         static_cast<double>(cluster_px);
}

ImageClosure image_closure(std::int64_t image_id, double capture_time,
                           std::span<const ClusterMask> clusters,
                           const MaskSet& berries, const ClosureOptions& opts) {
  ImageClosure out;
  out.berries_in = berries.size();

  MaskSet working = berries;
  if (opts.iqr && opts.iqr_scope == IqrScope::kImage) {
    working = filter_masks_iqr(berries, *opts.iqr);
    out.berries_filtered = berries.size() - working.size();
  }
  const auto assignment = assign_berries_to_clusters(working, clusters);
  out.berries_dropped = assignment.dropped;

  std::vector<const ClusterMask*> order;
  for (const auto& c : clusters) order.push_back(&c);
  std::sort(order.begin(), order.end(),
            [](const ClusterMask* a, const ClusterMask* b) { return a->id < b->id; });

  for (const auto* c : order) {
    MaskSet group = assignment.masks_for(c->id, working);
    if (opts.iqr && opts.iqr_scope == IqrScope::kCluster) {
      const auto before = group.size();
      group = filter_masks_iqr(group, *opts.iqr);
      out.berries_filtered += before - group.size();
    }
    ClosureRecord r;
    r.image_id = image_id;
    r.cluster_id = c->id;
    r.cluster_pixels = c->mask.area();
    if (r.cluster_pixels == 0) {
      throw EmptyMaskError("cluster " + std::to_string(c->id) + " is empty");
    }
    r.berry_pixels = berry_pixels(group, c->mask, opts.mode);
    r.vcc = 100.0 * static_cast<double>(r.berry_pixels) /
            static_cast<double>(r.cluster_pixels);
    r.capture_time = capture_time;
    out.records.push_back(r);
  }
  return out;
}

double image_vcc(std::span<const ClosureRecord> records, Aggregation agg) {
  if (records.empty()) throw ArgumentError("no closure records");
  if (agg == Aggregation::kPooled) {
    std::int64_t berry = 0, cluster = 0;
    for (const auto& r : records) {
      berry += r.berry_pixels;
      cluster += r.cluster_pixels;
    }
    return 100.0 * static_cast<double>(berry) / static_cast<double>(cluster);
  }
  double sum = 0.0;
  for (const auto& r : records) sum += r.vcc;
  return sum / static_cast<double>(records.size());
}

ClosureSeries build_series(std::span<const ClosureRecord> records,
                           Aggregation agg) {
  std::vector<ClosureRecord> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ClosureRecord& a, const ClosureRecord& b) {
              return std::tie(a.capture_time, a.image_id, a.cluster_id) <
                     std::tie(b.capture_time, b.image_id, b.cluster_id);
            });
  std::vector<std::string> dups;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& a = sorted[i - 1];
    const auto& b = sorted[i];
    if (a.capture_time == b.capture_time && a.image_id == b.image_id &&
        a.cluster_id == b.cluster_id) {
      dups.push_back("duplicate record for image " + std::to_string(b.image_id) +
                     ", cluster " + std::to_string(b.cluster_id) + ", time " +
                     format_double(b.capture_time));
    }
  }
  if (!dups.empty()) throw ValidationError(dups.front(), dups);

  ClosureSeries series;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].capture_time == sorted[i].capture_time) {
      ++j;
    }
    const std::span<const ClosureRecord> group(sorted.data() + i, j - i);
    SeriesPoint p;
    p.time = sorted[i].capture_time;
    p.mean_vcc = image_vcc(group, agg);
    for (const auto& r : group) p.values.push_back(r.vcc);
    series.points.push_back(std::move(p));
    i = j;
  }
  return series;
}

std::string write_closure_csv(std::span<const ClosureRecord> records) {
  std::string out(kClosureCsvHeader);
  out.push_back('\n');
  for (const auto& r : records) {
    out += std::to_string(r.image_id) + "," + std::to_string(r.cluster_id) +
           "," + format_double(r.capture_time) + "," +
           std::to_string(r.berry_pixels) + "," +
           std::to_string(r.cluster_pixels) + "," + format_double(r.vcc) + "\n";
  }
  return out;
}

namespace {

template <typename T>
T field(std::string_view s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("closure CSV line " + std::to_string(line) +
                      ": bad field '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<ClosureRecord> read_closure_csv(std::string_view text) {
  std::vector<ClosureRecord> out;
  std::size_t pos = 0, line_no = 0;
  bool header = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kClosureCsvHeader) {
        throw FormatError("closure CSV header mismatch");
      }
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6) {
      throw FormatError("closure CSV line " + std::to_string(line_no) +
                        ": expected 6 fields");
    }
    ClosureRecord r;
    r.image_id = field<std::int64_t>(f[0], line_no);
    r.cluster_id = field<std::int64_t>(f[1], line_no);
    r.capture_time = field<double>(f[2], line_no);
    r.berry_pixels = field<std::int64_t>(f[3], line_no);
    r.cluster_pixels = field<std::int64_t>(f[4], line_no);
    r.vcc = field<double>(f[5], line_no);
    out.push_back(r);
  }
  if (!header) throw FormatError("closure CSV is missing its header");
  return out;
}

}  // namespace grapeclose
