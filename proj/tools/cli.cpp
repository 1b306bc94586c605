#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "grapeclose/annotations.hpp"
#include "grapeclose/closure.hpp"
#include "grapeclose/config.hpp"
#include "grapeclose/error.hpp"
#include "grapeclose/format.hpp"
#include "grapeclose/maskops.hpp"
#include "grapeclose/metrics.hpp"
#include "grapeclose/plot.hpp"
#include "grapeclose/raster.hpp"
#include "grapeclose/regression.hpp"

namespace grapeclose::cli {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Write-temp-then-rename so readers never observe a partial file.
void write_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp + "'");
    out << contents;
    if (!out.flush()) throw FormatError("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_atomic(path, contents);
  }
}

ordered_json opt(const std::optional<double>& v, double scale = 1.0) {
  return v ? ordered_json(*v * scale) : ordered_json(nullptr);
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

struct Globals {
  std::string config_path;
  std::string plot_path;
  int jobs = 1;
  unsigned seed = 0;
};

// Flags that override config-file values when given.
struct Overrides {
  std::optional<double> tau;
  std::optional<int> top_k;
  std::optional<int> upsample_factor;
  std::optional<double> iqr_multiplier;
  std::optional<std::string> percentile_method;
  std::optional<std::string> closure_mode;
  std::optional<std::string> iqr_scope;
  std::optional<std::string> aggregation;
  std::optional<std::string> fit_input;
  std::optional<double> fraction_p;
  std::optional<int> max_detections;
};

RunConfig resolve_config(const Globals& g, const Overrides& o) {
  RunConfig c;
  if (!g.config_path.empty()) c = RunConfig::from_json(read_file(g.config_path));
  if (o.tau) c.tau = *o.tau;
  if (o.top_k) c.top_k = *o.top_k;
  if (o.upsample_factor) c.upsample_factor = *o.upsample_factor;
  if (o.iqr_multiplier) c.iqr_multiplier = *o.iqr_multiplier;
  if (o.percentile_method) c.percentile_method = parse_percentile_method(*o.percentile_method);
  if (o.closure_mode) c.closure_mode = parse_closure_mode(*o.closure_mode);
  if (o.iqr_scope) c.iqr_scope = parse_iqr_scope(*o.iqr_scope);
  if (o.aggregation) c.aggregation = parse_aggregation(*o.aggregation);
  if (o.fit_input) c.fit_input = parse_fit_input(*o.fit_input);
  if (o.fraction_p) c.fraction_p = *o.fraction_p;
  if (o.max_detections) c.max_detections = *o.max_detections;
  // Re-run the config checks on the merged values.
  return RunConfig::from_json("{}", c);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> tasks;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
    }));
  }
  for (auto& t : tasks) t.get();
  return out;
}

std::vector<ClusterMask> cluster_masks(const ImageRecord& im) {
  std::vector<ClusterMask> out;
  for (const auto& c : im.clusters) out.push_back({c.id, c.decode()});
  return out;
}

MaskSet berry_mask_set(const std::vector<ClusterAnnotation>& anns) {
  std::vector<BinaryMask> masks;
  for (const auto& a : anns) masks.push_back(a.decode());
  return MaskSet(std::move(masks));
}

// --- subcommands -----------------------------------------------------------

int cmd_validate(const std::string& dataset, const std::string& points_csv,
                 std::ostream& out) {
  ordered_json rep;
  try {
    DatasetIndex ds = parse_dataset(read_file(dataset));
    if (!points_csv.empty()) ds = merge_points(ds, parse_points_csv(read_file(points_csv)));
    rep["valid"] = true;
    rep["images"] = ds.images().size();
    rep["clusters"] = ds.cluster_count();
    rep["berries"] = ds.berry_count();
    out << dump(rep);
    return kOk;
  } catch (const ValidationError& e) {
    rep["valid"] = false;
    rep["error"] = "validation";
    rep["violations"] = e.violations();
    rep["offending_annotation_ids"] = e.offending_ids();
    out << dump(rep);
    return kValidationError;
  } catch (const FormatError& e) {
    rep["valid"] = false;
    rep["error"] = "format";
    rep["message"] = e.what();
    rep["byte_offset"] = e.byte_offset() ? ordered_json(*e.byte_offset())
                                         : ordered_json(nullptr);
    out << dump(rep);
    return kFormatError;
  }
}

int cmd_stats(const std::string& dataset, const std::string& output,
              const Globals& g, std::ostream& out) {
  const DatasetIndex ds = parse_dataset(read_file(dataset));
  const DatasetStats st = dataset_stats(ds);
  ordered_json rep;
  rep["image_count"] = st.image_count;
  rep["total_clusters"] = ds.cluster_count();
  rep["total_berries"] = ds.berry_count();
  rep["mean_clusters"] = opt(st.mean_clusters);
  rep["median_clusters"] = opt(st.median_clusters);
  rep["mean_berries"] = opt(st.mean_berries);
  rep["median_berries"] = opt(st.median_berries);
  rep["cluster_histogram"] = st.cluster_histogram;
  rep["berry_histogram"] = st.berry_histogram;
  emit(output, dump(rep), out);
  if (!g.plot_path.empty()) {
    write_atomic(g.plot_path,
                 histogram_svg({{"Grape cluster instances per image", st.cluster_histogram},
                                {"Berry instances per image", st.berry_histogram}},
                               "instances per image"));
  }
  return kOk;
}

int cmd_extract_points(const std::string& heatmap, const std::string& output,
                       const RunConfig& cfg, std::ostream& out) {
  const Heatmap raw = load_heatmap(read_file(heatmap));
  const Heatmap full = upsample_bilinear(raw, cfg.upsample_factor);
  const auto points = extract_keypoints(full, cfg.tau, cfg.top_k);
  std::string csv = "x,y,score\n";
  for (const auto& p : points) {
    csv += std::to_string(p.x) + "," + std::to_string(p.y) + "," +
           format_double(p.score) + "\n";
  }
  emit(output, csv, out);
  return kOk;
}

int cmd_filter_masks(const std::string& input, const std::string& output,
                     const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const MaskSet ms = parse_mask_set(read_file(input));
  const MaskSet kept = filter_masks_iqr(ms, cfg.iqr_options());
  emit(output, write_mask_set(kept), out);
  err << "kept " << kept.size() << " of " << ms.size() << " masks\n";
  return kOk;
}

int cmd_vcc(const std::string& dataset, const std::string& berries_path,
            bool use_iqr, const std::string& output, const RunConfig& cfg,
            const Globals& g, std::ostream& out, std::ostream& err) {
  const DatasetIndex ds = parse_dataset(read_file(dataset));
  std::optional<DatasetIndex> berry_ds;
  std::optional<MaskSet> berry_set;
  if (!berries_path.empty()) {
    const std::string text = read_file(berries_path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
      if (ds.images().size() != 1) {
        throw ArgumentError("a bare mask-set berry file needs a single-image dataset");
      }
      berry_set = parse_mask_set(text);
    } else {
      berry_ds = parse_dataset(text);
    }
  }

  ClosureOptions opts;
  opts.mode = cfg.closure_mode;
  if (use_iqr) opts.iqr = cfg.iqr_options();
  opts.iqr_scope = cfg.iqr_scope;

  const auto& images = ds.images();
  const auto results = parallel_map<ImageClosure>(
      images.size(), g.jobs, [&](std::size_t i) {
        const ImageRecord& im = images[i];
        MaskSet berries;
        if (berry_set) {
          berries = *berry_set;
        } else if (berry_ds) {
          const ImageRecord* b = berry_ds->find(im.id);
          if (b != nullptr) berries = berry_mask_set(b->berry_masks);
        } else {
          berries = berry_mask_set(im.berry_masks);
        }
        if (!berries.empty() &&
            (berries.width() != im.width || berries.height() != im.height)) {
          throw ValidationError(
              "berry masks for image " + std::to_string(im.id) + " have the wrong size",
              {"image " + std::to_string(im.id) + ": berry mask size mismatch"});
        }
        const auto clusters = cluster_masks(im);
        return image_closure(im.id, im.capture_time_weeks.value_or(0.0), clusters,
                             berries, opts);
      });

  std::vector<ClosureRecord> records;
  std::size_t filtered = 0, dropped = 0, total = 0;
  for (const auto& r : results) {
    records.insert(records.end(), r.records.begin(), r.records.end());
    filtered += r.berries_filtered;
    dropped += r.berries_dropped;
    total += r.berries_in;
  }
  emit(output, write_closure_csv(records), out);
  err << records.size() << " cluster records; " << total << " berry masks, "
      << filtered << " removed by IQR filter, " << dropped
      << " outside every cluster\n";
  return kOk;
}

int cmd_fit_closure(const std::string& csv, const std::string& output,
                    bool strict, const RunConfig& cfg, const Globals& g,
                    std::ostream& out) {
  const auto records = read_closure_csv(read_file(csv));
  const ClosureSeries series = build_series(records, cfg.aggregation);
  std::vector<FitPoint> pts;
  for (const auto& p : series.points) {
    if (cfg.fit_input == FitInput::kMeans) {
      pts.push_back({p.time, p.mean_vcc});
    } else {
      for (double v : p.values) pts.push_back({p.time, v});
    }
  }
  const FitResult fit = fit_asymptotic(pts);

  ordered_json rep;
  rep["asym"] = fit.model.asym;
  rep["intercept"] = fit.model.r0;
  rep["rate"] = fit.model.rate;
  rep["time_to_fraction_p"] = cfg.fraction_p;
  if (fit.status == FitStatus::kUnidentifiable) {
    rep["time_to_fraction_weeks"] = nullptr;
  } else {
    rep["time_to_fraction_weeks"] = time_to_fraction(fit.model, cfg.fraction_p);
  }
  rep["rss"] = fit.rss;
  rep["n_points"] = pts.size();
  rep["converged"] = fit.converged;
  rep["status"] = std::string(to_string(fit.status));
  rep["iterations"] = fit.iterations;
  rep["fit_input"] = std::string(to_string(cfg.fit_input));
  emit(output, dump(rep), out);

  if (!g.plot_path.empty()) {
    write_atomic(g.plot_path,
                 closure_curve_svg(pts, fit.model, "Cluster closure over time"));
  }
  if (strict && !fit.converged) return kComputationFailure;
  return kOk;
}

std::vector<std::int32_t> semantic_labels(const ImageRecord& im,
                                          const std::vector<ClusterAnnotation>& anns,
                                          std::optional<double> min_score) {
  std::vector<std::int32_t> labels(static_cast<std::size_t>(im.width) * im.height, 0);
  for (const auto& a : anns) {
    if (min_score && a.score.value_or(1.0) < *min_score) continue;
    const BinaryMask m = a.decode();
    const auto d = m.data();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (d[i]) labels[i] = 1;
    }
  }
  return labels;
}

int cmd_evaluate(const std::string& gt_path, const std::string& pred_path,
                 const std::string& category, const std::string& output,
                 const RunConfig& cfg, std::ostream& out) {
  const DatasetIndex gt = parse_dataset(read_file(gt_path));
  const DatasetIndex pred = parse_dataset(read_file(pred_path));
  if (category != kClusterCategory && category != kBerryCategory) {
    throw ArgumentError("category must be 'cluster' or 'berry'");
  }
  auto instances = [&](const ImageRecord& im) -> const std::vector<ClusterAnnotation>& {
    return category == kClusterCategory ? im.clusters : im.berry_masks;
  };

  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
  std::vector<CountPair> counts;
  std::vector<std::int32_t> pred_labels, gt_labels;
  std::vector<std::string> violations;
  bool any_gt_berries = false;
  for (const auto& im : gt.images()) {
    for (const auto& a : instances(im)) gts.push_back({im.id, a.id, a.decode()});
    any_gt_berries = any_gt_berries || !im.berries.empty() || !im.berry_masks.empty();
    const ImageRecord* p = pred.find(im.id);
    static const ImageRecord kNone{};
    const ImageRecord& pim = p != nullptr ? *p : kNone;
    if (p != nullptr && (p->width != im.width || p->height != im.height)) {
      violations.push_back("image " + std::to_string(im.id) +
                           ": prediction size differs from ground truth");
      continue;
    }
    for (const auto& a : instances(pim)) {
      if (!a.score) {
        violations.push_back("prediction annotation " + std::to_string(a.id) +
                             " has no score");
        continue;
      }
      dets.push_back({im.id, a.id, a.decode(), *a.score});
    }
    counts.push_back({static_cast<double>(im.berries.size() + im.berry_masks.size()),
                      static_cast<double>(pim.berries.size() + pim.berry_masks.size())});
    const auto gl = semantic_labels(im, instances(im), std::nullopt);
    auto pl = p != nullptr ? semantic_labels(im, instances(pim), cfg.miou_score_threshold)
                           : std::vector<std::int32_t>(gl.size(), 0);
    gt_labels.insert(gt_labels.end(), gl.begin(), gl.end());
    pred_labels.insert(pred_labels.end(), pl.begin(), pl.end());
  }
  for (const auto& pim : pred.images()) {
    if (gt.find(pim.id) == nullptr) {
      violations.push_back("prediction image " + std::to_string(pim.id) +
                           " is not in the ground truth");
    }
  }
  if (!violations.empty()) throw ValidationError(violations.front(), violations);

  ApOptions ap_opts;
  ap_opts.max_detections = cfg.max_detections;
  const ApReport ap = average_precision(dets, gts, ap_opts);

  ordered_json rep;
  rep["category"] = category;
  rep["n_images"] = gt.images().size();
  rep["n_ground_truth"] = gts.size();
  rep["n_detections"] = dets.size();
  ordered_json apj;
  apj["map"] = opt(ap.map, 100.0);
  apj["ap50"] = opt(ap.ap50, 100.0);
  apj["ap75"] = opt(ap.ap75, 100.0);
  apj["ap_small"] = opt(ap.ap_small, 100.0);
  apj["ap_medium"] = opt(ap.ap_medium, 100.0);
  apj["ap_large"] = opt(ap.ap_large, 100.0);
  ordered_json per = ordered_json::array();
  for (std::size_t i = 0; i < ap.thresholds.size(); ++i) {
    per.push_back({{"iou", ap.thresholds[i]}, {"ap", opt(ap.per_threshold[i], 100.0)}});
  }
  apj["per_threshold"] = per;
  rep["ap"] = apj;
  if (!gt_labels.empty()) {
    try {
      rep["miou"] = miou(pred_labels, gt_labels, 2);
    } catch (const ArgumentError&) {
      rep["miou"] = nullptr;
    }
  }
  if (any_gt_berries && !counts.empty()) {
    rep["mae"] = mae(counts);
    rep["rmse"] = rmse(counts);
  }
  emit(output, dump(rep), out);
  return kOk;
}

std::vector<double> log10_areas(const MaskSet& ms) {
  std::vector<double> v;
  for (auto a : ms.areas()) {
    if (a > 0) v.push_back(std::log10(static_cast<double>(a)));
  }
  return v;
}

int cmd_boxplot(const std::string& before, const std::string& after,
                const std::string& output, std::ostream& out) {
  const auto b = log10_areas(parse_mask_set(read_file(before)));
  const auto a = log10_areas(parse_mask_set(read_file(after)));
  if (b.empty() || a.empty()) throw ArgumentError("box plot needs nonempty mask sets");
  emit(output,
       boxplot_svg({{"before filtering", b}, {"after filtering", a}},
                   "Berry mask area", "log10(area, px)"),
       out);
  return kOk;
}

int cmd_simulate(const AsymptoticModel& m, const std::string& times_csv,
                 int replicates, double noise, const std::string& output,
                 const Globals& g, std::ostream& out) {
  std::vector<double> times;
  std::stringstream ss(times_csv);
  for (std::string tok; std::getline(ss, tok, ',');) times.push_back(std::stod(tok));
  if (times.empty() || replicates < 1) throw ArgumentError("need times and replicates");
  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> gauss(0.0, noise);
  constexpr std::int64_t kClusterPixels = 100000;
  std::vector<ClosureRecord> records;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (int r = 0; r < replicates; ++r) {
      double v = eval_model(m, times[ti]) + (noise > 0 ? gauss(rng) : 0.0);
      v = std::clamp(v, 0.0, 100.0);
      ClosureRecord rec;
      rec.image_id = static_cast<std::int64_t>(ti);
      rec.cluster_id = r;
      rec.capture_time = times[ti];
      rec.cluster_pixels = kClusterPixels;
      rec.berry_pixels = std::llround(v / 100.0 * kClusterPixels);
      rec.vcc = 100.0 * static_cast<double>(rec.berry_pixels) / kClusterPixels;
      records.push_back(rec);
    }
  }
  emit(output, write_closure_csv(records), out);
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kFormat:
    case ErrorKind::kRange:
      return kFormatError;
    case ErrorKind::kValidation:
      return kValidationError;
    case ErrorKind::kArgument:
    case ErrorKind::kEmptyMask:
    case ErrorKind::kFitFailure:
      return kComputationFailure;
  }
  return kComputationFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grape cluster closure pipeline tools", "grapeclose"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  Overrides o;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--plot", g.plot_path, "Write an SVG figure to this path");
  app.add_option("--jobs", g.jobs, "Worker threads for per-image work")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for synthetic noise (simulate)");

  std::string output;
  auto* validate = app.add_subcommand("validate", "Parse and validate an annotation file");
  std::string dataset, points_csv;
  validate->add_option("dataset", dataset)->required();
  validate->add_option("--points", points_csv, "CSV of berry points (image_id,x,y)");

  auto* stats = app.add_subcommand("stats", "Per-image instance statistics");
  stats->add_option("dataset", dataset)->required();
  stats->add_option("-o,--output", output);

  auto* extract = app.add_subcommand("extract-points", "Decode berry keypoints from a heatmap");
  std::string heatmap;
  extract->add_option("heatmap", heatmap)->required();
  extract->add_option("--tau", o.tau);
  extract->add_option("--top-k", o.top_k);
  extract->add_option("--factor", o.upsample_factor, "Upsampling factor");
  extract->add_option("-o,--output", output);

  auto* filter = app.add_subcommand("filter-masks", "IQR outlier filter on a mask set");
  std::string maskset;
  filter->add_option("masks", maskset)->required();
  filter->add_option("--multiplier", o.iqr_multiplier);
  filter->add_option("--percentile-method", o.percentile_method);
  filter->add_option("-o,--output", output);

  auto* vcc_cmd = app.add_subcommand("vcc", "Per-cluster closure records");
  std::string berries_path;
  bool use_iqr = false;
  vcc_cmd->add_option("dataset", dataset)->required();
  vcc_cmd->add_option("--berries", berries_path, "Berry masks (annotation file or mask set)");
  vcc_cmd->add_flag("--iqr", use_iqr, "Filter berry masks before scoring");
  vcc_cmd->add_option("--iqr-scope", o.iqr_scope, "image|cluster");
  vcc_cmd->add_option("--multiplier", o.iqr_multiplier);
  vcc_cmd->add_option("--closure-mode", o.closure_mode, "clipped|literal");
  vcc_cmd->add_option("-o,--output", output);

  auto* fit = app.add_subcommand("fit-closure", "Fit the asymptotic closure curve");
  std::string closure_csv;
  bool strict = false;
  fit->add_option("records", closure_csv)->required();
  fit->add_option("--fit-input", o.fit_input, "points|means");
  fit->add_option("--aggregation", o.aggregation, "cluster-mean|pooled");
  fit->add_option("--fraction", o.fraction_p);
  fit->add_flag("--strict", strict, "Exit 4 when the fit does not converge");
  fit->add_option("-o,--output", output);

  auto* evaluate = app.add_subcommand("evaluate", "Counting, mIoU and mask AP metrics");
  std::string gt_path, pred_path, category = std::string(kClusterCategory);
  evaluate->add_option("ground_truth", gt_path)->required();
  evaluate->add_option("predictions", pred_path)->required();
  evaluate->add_option("--category", category, "cluster|berry");
  evaluate->add_option("--max-dets", o.max_detections);
  evaluate->add_option("-o,--output", output);

  auto* box = app.add_subcommand("boxplot", "Log-area box plots before/after filtering");
  std::string before, after;
  box->add_option("before", before)->required();
  box->add_option("after", after)->required();
  box->add_option("-o,--output", output);

  auto* sim = app.add_subcommand("simulate", "Synthetic closure records from a model");
  AsymptoticModel model{90.0, 40.0, 0.8};
  std::string times = "0,1,2,3,4,5,6";
  int replicates = 1;
  double noise = 0.0;
  sim->add_option("--asym", model.asym);
  sim->add_option("--intercept", model.r0);
  sim->add_option("--rate", model.rate);
  sim->add_option("--times", times, "Comma-separated weeks");
  sim->add_option("--replicates", replicates);
  sim->add_option("--noise", noise, "Gaussian sigma in percent");
  sim->add_option("-o,--output", output);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  RunConfig cfg;
  try {
    cfg = resolve_config(g, o);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::kFormat ? kFormatError : kUsage;
  }

  try {
    if (*validate) return cmd_validate(dataset, points_csv, out);
    if (*stats) return cmd_stats(dataset, output, g, out);
    if (*extract) return cmd_extract_points(heatmap, output, cfg, out);
    if (*filter) return cmd_filter_masks(maskset, output, cfg, out, err);
    if (*vcc_cmd) return cmd_vcc(dataset, berries_path, use_iqr, output, cfg, g, out, err);
    if (*fit) return cmd_fit_closure(closure_csv, output, strict, cfg, g, out);
    if (*evaluate) return cmd_evaluate(gt_path, pred_path, category, output, cfg, out);
    if (*box) return cmd_boxplot(before, after, output, out);
    if (*sim) return cmd_simulate(model, times, replicates, noise, output, g, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return kValidationError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFormatError;
  }
  return kUsage;
}

}  // namespace grapeclose::cli
