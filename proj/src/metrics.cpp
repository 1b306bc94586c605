#include "grapeclose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "grapeclose/error.hpp"
#include "grapeclose/maskops.hpp"

namespace grapeclose {

double mae(std::span<const CountPair> pairs) {
  if (pairs.empty()) throw ArgumentError("MAE of an empty sample");
  double s = 0.0;
  for (const auto& p : pairs) s += std::abs(p.y - p.y_hat);
  return s / static_cast<double>(pairs.size());
}

double rmse(std::span<const CountPair> pairs) {
  if (pairs.empty()) throw ArgumentError("RMSE of an empty sample");
  double s = 0.0;
  for (const auto& p : pairs) s += (p.y - p.y_hat) * (p.y - p.y_hat);
  return std::sqrt(s / static_cast<double>(pairs.size()));
}

double miou(std::span<const std::int32_t> pred, std::span<const std::int32_t> gt,
            int n_classes) {
  if (pred.size() != gt.size()) throw ArgumentError("label maps differ in size");
  if (n_classes < 1) throw ArgumentError("n_classes must be >= 1");
  std::vector<std::int64_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto p = pred[i];
    const auto g = gt[i];
    if (p < 0 || p >= n_classes || g < 0 || g >= n_classes) {
      throw ArgumentError("label out of range");
    }
    if (p == g) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[g];
    }
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < n_classes; ++c) {
    const auto denom = tp[c] + fp[c] + fn[c];
    if (denom == 0) continue;
    sum += static_cast<double>(tp[c]) / static_cast<double>(denom);
    ++present;
  }
  if (present == 0) throw ArgumentError("mIoU of empty label maps");
  return sum / present;
}

std::vector<double> ApOptions::default_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

bool in_bucket(AreaBucket b, std::int64_t area) noexcept {
  constexpr std::int64_t kSmallMax = 32 * 32;
  constexpr std::int64_t kMediumMax = 96 * 96;
  switch (b) {
    case AreaBucket::kAll: return true;
    case AreaBucket::kSmall: return area < kSmallMax;
    case AreaBucket::kMedium: return area >= kSmallMax && area <= kMediumMax;
    case AreaBucket::kLarge: return area > kMediumMax;
  }
  return false;
}

namespace {

struct ImageEval {
  std::int64_t image_id = 0;
  std::vector<const Detection*> dets;  // score desc, id asc
  std::vector<const GroundTruth*> gts;
  std::vector<std::int64_t> det_area;
  std::vector<std::int64_t> gt_area;
  std::vector<std::vector<double>> iou;  // [det][gt]
};

std::vector<ImageEval> prepare(std::span<const Detection> dets,
                               std::span<const GroundTruth> gts,
                               int max_detections) {
  std::map<std::int64_t, ImageEval> by_image;
  for (const auto& d : dets) {
    if (!std::isfinite(d.score)) throw ArgumentError("detection score not finite");
    by_image[d.image_id].dets.push_back(&d);
  }
  for (const auto& g : gts) by_image[g.image_id].gts.push_back(&g);

  std::vector<ImageEval> out;
  for (auto& [id, e] : by_image) {
    e.image_id = id;
    std::stable_sort(e.dets.begin(), e.dets.end(),
                     [](const Detection* a, const Detection* b) {
                       if (a->score != b->score) return a->score > b->score;
                       return a->id < b->id;
                     });
    if (max_detections > 0 && e.dets.size() > static_cast<std::size_t>(max_detections)) {
      e.dets.resize(max_detections);
    }
    for (const auto* d : e.dets) e.det_area.push_back(d->mask.area());
    for (const auto* g : e.gts) e.gt_area.push_back(g->mask.area());
    e.iou.assign(e.dets.size(), std::vector<double>(e.gts.size(), 0.0));
    for (std::size_t i = 0; i < e.dets.size(); ++i) {
      for (std::size_t j = 0; j < e.gts.size(); ++j) {
        e.iou[i][j] = mask_iou(e.dets[i]->mask, e.gts[j]->mask);
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct ScoredDet {
  double score;
  std::int64_t image_id;
  std::int64_t det_id;
  bool tp;
};

std::optional<double> evaluate(const std::vector<ImageEval>& images,
                               double threshold, AreaBucket bucket) {
  std::vector<ScoredDet> pool;
  std::size_t npig = 0;
  for (const auto& e : images) {
    const std::size_t G = e.gts.size();
    // Non-ignored ground truths are tried before ignored ones.
    std::vector<std::size_t> gorder;
    std::vector<bool> ignored(G);
    for (std::size_t j = 0; j < G; ++j) {
      ignored[j] = !in_bucket(bucket, e.gt_area[j]);
      if (!ignored[j]) gorder.push_back(j);
    }
    npig += gorder.size();
    for (std::size_t j = 0; j < G; ++j) {
      if (ignored[j]) gorder.push_back(j);
    }

    std::vector<bool> gt_used(G, false);
    for (std::size_t i = 0; i < e.dets.size(); ++i) {
      long match = -1;
      double best = threshold;
      for (const auto j : gorder) {
        if (gt_used[j]) continue;
        if (match >= 0 && !ignored[match] && ignored[j]) break;
        const double iou = e.iou[i][j];
        if (match < 0 ? iou >= best : iou > best) {
          best = iou;
          match = static_cast<long>(j);
        }
      }
      bool det_ignored;
      if (match >= 0) {
        gt_used[match] = true;
        det_ignored = ignored[match];
      } else {
        det_ignored = !in_bucket(bucket, e.det_area[i]);
      }
      if (!det_ignored) {
        pool.push_back({e.dets[i]->score, e.image_id, e.dets[i]->id, match >= 0});
      }
    }
  }
  if (npig == 0) return std::nullopt;

  std::sort(pool.begin(), pool.end(), [](const ScoredDet& a, const ScoredDet& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.image_id, a.det_id) < std::tie(b.image_id, b.det_id);
  });

  const std::size_t nd = pool.size();
  std::vector<double> rc(nd), pr(nd);
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < nd; ++i) {
    (pool[i].tp ? tp : fp) += 1.0;
    rc[i] = tp / static_cast<double>(npig);
    pr[i] = tp / (tp + fp);
  }
  for (std::size_t i = nd; i-- > 1;) pr[i - 1] = std::max(pr[i - 1], pr[i]);

  double sum = 0.0;
  for (int r = 0; r <= 100; ++r) {
    const double level = r / 100.0;
    const auto it = std::lower_bound(rc.begin(), rc.end(), level);
    if (it != rc.end()) sum += pr[static_cast<std::size_t>(it - rc.begin())];
  }
  return sum / 101.0;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (const auto& x : v) {
    if (!x) return std::nullopt;
    s += *x;
  }
  return s / static_cast<double>(v.size());
}

}  // namespace

std::optional<double> average_precision_at(std::span<const Detection> dets,
                                           std::span<const GroundTruth> gts,
                                           double iou_threshold,
                                           AreaBucket bucket,
                                           int max_detections) {
  return evaluate(prepare(dets, gts, max_detections), iou_threshold, bucket);
}

ApReport average_precision(std::span<const Detection> dets,
                           std::span<const GroundTruth> gts,
                           const ApOptions& opts) {
  if (opts.iou_thresholds.empty()) throw ArgumentError("no IoU thresholds");
  for (double t : opts.iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ArgumentError("IoU threshold outside (0, 1]");
  }
  const auto images = prepare(dets, gts, opts.max_detections);

  ApReport rep;
  rep.thresholds = opts.iou_thresholds;
  std::vector<std::optional<double>> small, medium, large;
  for (double t : opts.iou_thresholds) {
    rep.per_threshold.push_back(evaluate(images, t, AreaBucket::kAll));
    small.push_back(evaluate(images, t, AreaBucket::kSmall));
    medium.push_back(evaluate(images, t, AreaBucket::kMedium));
    large.push_back(evaluate(images, t, AreaBucket::kLarge));
  }
  rep.map = mean_of(rep.per_threshold);
  for (std::size_t i = 0; i < rep.thresholds.size(); ++i) {
    if (std::abs(rep.thresholds[i] - 0.5) < 1e-12) rep.ap50 = rep.per_threshold[i];
    if (std::abs(rep.thresholds[i] - 0.75) < 1e-12) rep.ap75 = rep.per_threshold[i];
  }
  rep.ap_small = mean_of(small);
  rep.ap_medium = mean_of(medium);
  rep.ap_large = mean_of(large);
  return rep;
}

}  // namespace grapeclose
