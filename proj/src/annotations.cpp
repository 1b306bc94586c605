#include "grapeclose/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include <json.hpp>

#include "grapeclose/error.hpp"

namespace grapeclose {

using nlohmann::json;

DatasetIndex::DatasetIndex(std::vector<ImageRecord> images,
                           std::map<std::int64_t, std::string> categories)
    : images_(std::move(images)), categories_(std::move(categories)) {
  std::stable_sort(images_.begin(), images_.end(),
                   [](const ImageRecord& a, const ImageRecord& b) {
                     return a.id < b.id;
                   });
}

const ImageRecord* DatasetIndex::find(std::int64_t image_id) const noexcept {
  auto it = std::lower_bound(
      images_.begin(), images_.end(), image_id,
      [](const ImageRecord& r, std::int64_t id) { return r.id < id; });
  if (it == images_.end() || it->id != image_id) return nullptr;
  return &*it;
}

std::size_t DatasetIndex::cluster_count() const noexcept {
  std::size_t n = 0;
  for (const auto& im : images_) n += im.clusters.size();
  return n;
}

std::size_t DatasetIndex::berry_count() const noexcept {
  std::size_t n = 0;
  for (const auto& im : images_) n += im.berries.size() + im.berry_masks.size();
  return n;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(where + ": missing key '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + ": key '" + key + "' has the wrong type");
  }
}

const json& require_array(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) {
    throw FormatError(std::string("top-level '") + key +
                      "' must be an array");
  }
  return *it;
}

struct Violations {
  std::vector<std::string> messages;
  std::set<std::int64_t> annotation_ids;

  void add(std::string msg) { messages.push_back(std::move(msg)); }
  void add(std::int64_t ann_id, std::string msg) {
    annotation_ids.insert(ann_id);
    messages.push_back("annotation " + std::to_string(ann_id) + ": " +
                       std::move(msg));
  }
};

// Decodes a `segmentation` value into an RLE at the image's size.
// Returns false (after recording a violation) when the value is unusable.
bool decode_segmentation(const json& seg, const ImageRecord& image,
                         std::int64_t ann_id, ClusterAnnotation& out,
                         Violations& v) {
  if (seg.is_array()) {
    std::vector<std::vector<double>> rings;
    for (const auto& ring : seg) {
      if (!ring.is_array()) {
        throw FormatError("annotation " + std::to_string(ann_id) +
                          ": polygon ring must be an array");
      }
      std::vector<double> coords;
      for (const auto& c : ring) {
        if (!c.is_number()) {
          throw FormatError("annotation " + std::to_string(ann_id) +
                            ": polygon coordinates must be numbers");
        }
        coords.push_back(c.get<double>());
      }
      if (coords.size() < 6 || coords.size() % 2 != 0) {
        v.add(ann_id, "polygon needs at least 3 (x, y) vertices");
        return false;
      }
      rings.push_back(std::move(coords));
    }
    if (rings.empty()) {
      v.add(ann_id, "empty polygon list");
      return false;
    }
    out.mask = rle_encode(polygons_to_mask(rings, image.width, image.height));
    out.polygons = std::move(rings);
    return true;
  }
  if (seg.is_object()) {
    const std::string where = "annotation " + std::to_string(ann_id);
    const auto size = require<std::vector<int>>(seg, "size", where);
    if (size.size() != 2) throw FormatError(where + ": RLE size must be [h, w]");
    const int h = size[0];
    const int w = size[1];
    if (h != image.height || w != image.width) {
      v.add(ann_id, "mask size " + std::to_string(h) + "x" +
                        std::to_string(w) + " differs from image " +
                        std::to_string(image.height) + "x" +
                        std::to_string(image.width));
      return false;
    }
    auto it = seg.find("counts");
    if (it == seg.end()) throw FormatError(where + ": missing key 'counts'");
    Rle rle{h, w, {}};
    if (it->is_string()) {
      rle.counts = rle_decompress_counts(it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& c : *it) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
          throw FormatError(where + ": RLE counts must be nonnegative integers");
        }
        rle.counts.push_back(c.get<std::uint32_t>());
      }
    } else {
      throw FormatError(where + ": RLE counts must be an array or string");
    }
    std::uint64_t sum = 0;
    for (auto c : rle.counts) sum += c;
    if (sum != static_cast<std::uint64_t>(h) * w) {
      v.add(ann_id, "RLE counts do not sum to height*width");
      return false;
    }
    out.mask = std::move(rle);
    return true;
  }
  throw FormatError("annotation " + std::to_string(ann_id) +
                    ": segmentation must be a polygon list or RLE object");
}

}  // namespace

DatasetIndex parse_dataset(std::string_view json_bytes) {
  json doc;
  try {
    doc = json::parse(json_bytes.begin(), json_bytes.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw FormatError("top-level value must be an object");

  Violations v;
  std::vector<ImageRecord> images;
  std::map<std::int64_t, std::size_t> image_slot;
  std::set<std::int64_t> bad_images;
  for (const auto& j : require_array(doc, "images")) {
    if (!j.is_object()) throw FormatError("image entries must be objects");
    ImageRecord im;
    im.id = require<std::int64_t>(j, "id", "image");
    const std::string where = "image " + std::to_string(im.id);
    im.width = require<int>(j, "width", where);
    im.height = require<int>(j, "height", where);
    if (auto it = j.find("file_name"); it != j.end() && it->is_string()) {
      im.file_name = it->get<std::string>();
    }
    if (auto it = j.find("capture_time_weeks"); it != j.end()) {
      if (!it->is_number()) {
        throw FormatError(where + ": capture_time_weeks must be a number");
      }
      im.capture_time_weeks = it->get<double>();
    }
    if (im.width <= 0 || im.height <= 0) {
      v.add(where + ": width and height must be positive");
      bad_images.insert(im.id);
    }
    if (image_slot.count(im.id)) {
      v.add(where + ": duplicate image id");
      continue;
    }
    image_slot[im.id] = images.size();
    images.push_back(std::move(im));
  }

  std::map<std::int64_t, std::string> categories;
  for (const auto& j : require_array(doc, "categories")) {
    if (!j.is_object()) throw FormatError("category entries must be objects");
    const auto id = require<std::int64_t>(j, "id", "category");
    const auto name = require<std::string>(
        j, "name", "category " + std::to_string(id));
    if (!categories.emplace(id, lower(name)).second) {
      v.add("category " + std::to_string(id) + ": duplicate category id");
    }
  }

  static const json kEmpty = json::array();
  const json& anns = doc.contains("annotations")
                         ? require_array(doc, "annotations")
                         : kEmpty;

  struct PendingLink {
    std::int64_t ann_id;
    std::size_t image;
    std::int64_t cluster_id;
  };
  std::vector<PendingLink> links;
  std::set<std::int64_t> ann_ids;

  for (const auto& j : anns) {
    if (!j.is_object()) throw FormatError("annotation entries must be objects");
    const auto id = require<std::int64_t>(j, "id", "annotation");
    const std::string where = "annotation " + std::to_string(id);
    const auto image_id = require<std::int64_t>(j, "image_id", where);
    const auto category_id = require<std::int64_t>(j, "category_id", where);
    if (!ann_ids.insert(id).second) v.add(id, "duplicate annotation id");

    auto im_it = image_slot.find(image_id);
    if (im_it == image_slot.end()) {
      v.add(id, "references missing image " + std::to_string(image_id));
      continue;
    }
    if (bad_images.count(image_id)) {
      v.add(id, "references image " + std::to_string(image_id) + " with invalid size");
      continue;
    }
    auto cat_it = categories.find(category_id);
    if (cat_it == categories.end()) {
      v.add(id, "references missing category " + std::to_string(category_id));
      continue;
    }
    ImageRecord& image = images[im_it->second];

    std::optional<double> score;
    if (auto it = j.find("score"); it != j.end()) {
      if (!it->is_number()) throw FormatError(where + ": score must be a number");
      score = it->get<double>();
      if (!(*score >= 0.0 && *score <= 1.0)) {
        v.add(id, "score outside [0, 1]");
      }
    }

    const bool has_seg = j.contains("segmentation");
    const bool has_point = j.contains("point");
    if (has_seg == has_point) {
      v.add(id, "needs exactly one of 'segmentation' or 'point'");
      continue;
    }
    const std::string& category = cat_it->second;
    const bool is_cluster = category == kClusterCategory;
    const bool is_berry = category == kBerryCategory;
    if (!is_cluster && !is_berry) continue;

    if (has_point) {
      if (!is_berry) {
        v.add(id, "point annotations must use the berry category");
        continue;
      }
      const auto xy = require<std::vector<double>>(j, "point", where);
      if (xy.size() != 2) throw FormatError(where + ": point must be [x, y]");
      BerryPoint p{id, xy[0], xy[1], std::nullopt, score};
      if (!(p.x >= 0 && p.x < image.width && p.y >= 0 && p.y < image.height)) {
        v.add(id, "point outside image bounds");
        continue;
      }
      if (auto it = j.find("cluster_id"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) {
          throw FormatError(where + ": cluster_id must be an integer");
        }
        p.cluster_id = it->get<std::int64_t>();
        links.push_back({id, im_it->second, *p.cluster_id});
      }
      image.berries.push_back(p);
      continue;
    }

    ClusterAnnotation ann;
    ann.id = id;
    ann.score = score;
    if (!decode_segmentation(j["segmentation"], image, id, ann, v)) continue;
    ann.area = rle_area(ann.mask);
    if (ann.area == 0) {
      v.add(id, "segmentation mask is empty");
      continue;
    }
    ann.bbox = mask_to_bbox(rle_decode(ann.mask));
    (is_cluster ? image.clusters : image.berry_masks).push_back(std::move(ann));
  }

  for (const auto& link : links) {
    const auto& clusters = images[link.image].clusters;
    const bool found =
        std::any_of(clusters.begin(), clusters.end(),
                    [&](const ClusterAnnotation& c) {
                      return c.id == link.cluster_id;
                    });
    if (!found) {
      v.add(link.ann_id, "cluster_id " + std::to_string(link.cluster_id) +
                             " is not a cluster of the same image");
    }
  }

  if (!v.messages.empty()) {
    std::ostringstream what;
    what << v.messages.size() << " validation error(s); first: "
         << v.messages.front();
    throw ValidationError(
        what.str(), v.messages,
        std::vector<std::int64_t>(v.annotation_ids.begin(),
                                  v.annotation_ids.end()));
  }
  return DatasetIndex(std::move(images), std::move(categories));
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T value{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError("CSV line " + std::to_string(line) + ": bad field '" +
                      std::string(s) + "'");
  }
  return value;
}

}  // namespace

std::vector<CsvPoint> parse_points_csv(std::string_view text) {
  std::vector<CsvPoint> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "image_id,x,y") {
        throw FormatError("CSV header must be 'image_id,x,y'");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos ||
        line.find(',', c2 + 1) != std::string_view::npos) {
      throw FormatError("CSV line " + std::to_string(line_no) +
                        ": expected 3 fields");
    }
    out.push_back({parse_field<std::int64_t>(line.substr(0, c1), line_no),
                   parse_field<double>(line.substr(c1 + 1, c2 - c1 - 1), line_no),
                   parse_field<double>(line.substr(c2 + 1), line_no)});
  }
  if (!header_seen) throw FormatError("CSV is missing its header");
  return out;
}

DatasetIndex merge_points(const DatasetIndex& ds,
                          const std::vector<CsvPoint>& points) {
  std::vector<ImageRecord> images = ds.images();
  std::vector<std::string> violations;
  std::vector<std::int64_t> bad_ids;
  std::int64_t next_id = 0;
  for (const auto& im : images) {
    for (const auto& c : im.clusters) next_id = std::max(next_id, c.id);
    for (const auto& b : im.berries) next_id = std::max(next_id, b.id);
    for (const auto& b : im.berry_masks) next_id = std::max(next_id, b.id);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    auto it = std::find_if(images.begin(), images.end(),
                           [&](const ImageRecord& r) { return r.id == p.image_id; });
    if (it == images.end()) {
      violations.push_back("CSV row " + std::to_string(i + 1) +
                           ": missing image " + std::to_string(p.image_id));
      bad_ids.push_back(p.image_id);
      continue;
    }
    if (!(p.x >= 0 && p.x < it->width && p.y >= 0 && p.y < it->height)) {
      violations.push_back("CSV row " + std::to_string(i + 1) +
                           ": point outside image bounds");
      continue;
    }
    it->berries.push_back({++next_id, p.x, p.y, std::nullopt, std::nullopt});
  }
  if (!violations.empty()) {
    throw ValidationError("invalid CSV points: " + violations.front(),
                          violations, bad_ids);
  }
  return DatasetIndex(std::move(images), ds.categories());
}

namespace {

std::vector<std::size_t> histogram(const std::vector<std::size_t>& values) {
  std::vector<std::size_t> h;
  for (auto v : values) {
    if (v >= h.size()) h.resize(v + 1, 0);
    ++h[v];
  }
  return h;
}

std::optional<double> mean_of(const std::vector<std::size_t>& values) {
  if (values.empty()) return std::nullopt;
  double s = 0;
  for (auto v : values) s += static_cast<double>(v);
  return s / static_cast<double>(values.size());
}

std::optional<double> median_of(std::vector<std::size_t> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return static_cast<double>(values[n / 2]);
  return 0.5 * (static_cast<double>(values[n / 2 - 1]) +
                static_cast<double>(values[n / 2]));
}

}  // namespace

DatasetStats dataset_stats(const DatasetIndex& ds) {
  std::vector<std::size_t> clusters, berries;
  for (const auto& im : ds.images()) {
    clusters.push_back(im.clusters.size());
    berries.push_back(im.berries.size() + im.berry_masks.size());
  }
  DatasetStats st;
  st.image_count = ds.images().size();
  st.cluster_histogram = histogram(clusters);
  st.berry_histogram = histogram(berries);
  st.mean_clusters = mean_of(clusters);
  st.median_clusters = median_of(clusters);
  st.mean_berries = mean_of(berries);
  st.median_berries = median_of(berries);
  return st;
}

MaskSet parse_mask_set(std::string_view json_bytes) {
  json doc;
  try {
    doc = json::parse(json_bytes.begin(), json_bytes.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_array()) throw FormatError("mask set must be a JSON array");
  std::vector<BinaryMask> masks;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const std::string where = "mask " + std::to_string(i);
    if (!j.is_object()) throw FormatError(where + ": must be an RLE object");
    const auto size = require<std::vector<int>>(j, "size", where);
    if (size.size() != 2) throw FormatError(where + ": size must be [h, w]");
    auto it = j.find("counts");
    if (it == j.end()) throw FormatError(where + ": missing key 'counts'");
    Rle rle{size[0], size[1], {}};
    if (it->is_string()) {
      rle.counts = rle_decompress_counts(it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& c : *it) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
          throw FormatError(where + ": counts must be nonnegative integers");
        }
        rle.counts.push_back(c.get<std::uint32_t>());
      }
    } else {
      throw FormatError(where + ": counts must be an array or string");
    }
    masks.push_back(rle_decode(rle));
  }
  try {
    return MaskSet(std::move(masks));
  } catch (const ArgumentError& e) {
    throw FormatError(e.what());
  }
}

std::string write_mask_set(const MaskSet& ms, bool compressed) {
  json arr = json::array();
  for (const auto& m : ms.masks()) {
    const Rle rle = rle_encode(m);
    json j;
    j["size"] = {rle.height, rle.width};
    if (compressed) {
      j["counts"] = rle_compress(rle);
    } else {
      j["counts"] = rle.counts;
    }
    arr.push_back(std::move(j));
  }
  return arr.dump() + "\n";
}

}  // namespace grapeclose
