#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "grapeclose/closure.hpp"
#include "grapeclose/error.hpp"
#include "grapeclose/format.hpp"
#include "grapeclose/mask.hpp"
#include "grapeclose/maskops.hpp"
#include "grapeclose/metrics.hpp"
#include "grapeclose/plot.hpp"
#include "grapeclose/raster.hpp"
#include "grapeclose/regression.hpp"

namespace py = pybind11;
using namespace grapeclose;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

BinaryMask to_mask(const py::array& obj) {
  U8Array a = U8Array::ensure(obj);
  if (!a || a.ndim() != 2) throw ArgumentError("mask must be a 2-D array");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  std::vector<std::uint8_t> data(a.data(), a.data() + a.size());
  for (auto& v : data) v = v != 0;
  return BinaryMask(w, h, std::move(data));
}

py::array_t<std::uint8_t> from_mask(const BinaryMask& m) {
  py::array_t<std::uint8_t> out({m.height(), m.width()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Heatmap to_heatmap(const py::array& obj) {
  F64Array a = F64Array::ensure(obj);
  if (!a || a.ndim() != 2) throw ArgumentError("heatmap must be a 2-D array");
  return Heatmap(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                 std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> from_heatmap(const Heatmap& h) {
  py::array_t<double> out({h.height(), h.width()});
  std::copy(h.values().begin(), h.values().end(), out.mutable_data());
  return out;
}

MaskSet to_mask_set(const std::vector<py::array>& masks) {
  std::vector<BinaryMask> v;
  v.reserve(masks.size());
  for (const auto& m : masks) v.push_back(to_mask(m));
  return MaskSet(std::move(v));
}

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  d["asym"] = r.model.asym;
  d["r0"] = r.model.r0;
  d["rate"] = r.model.rate;
  d["rss"] = r.rss;
  d["initial_rss"] = r.initial_rss;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["status"] = std::string(to_string(r.status));
  return d;
}

}  // namespace

PYBIND11_MODULE(_grapeclose, m) {
  m.doc() = "Cluster closure measurement from berry and cluster masks";
  m.attr("__version__") = std::string(kToolVersion);

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<EmptyMaskError>(m, "EmptyMaskError", base.ptr());
  py::register_exception<FitFailure>(m, "FitFailure", base.ptr());

  // Run-length codec. Counts are column-major, starting with zeros.
  m.def("rle_encode", [](const py::array& mask) { return rle_encode(to_mask(mask)).counts; },
        py::arg("mask"));
  m.def(
      "rle_decode",
      [](std::vector<std::uint32_t> counts, int height, int width) {
        return from_mask(rle_decode(Rle{height, width, std::move(counts)}));
      },
      py::arg("counts"), py::arg("height"), py::arg("width"));
  m.def(
      "rle_compress",
      [](const std::vector<std::uint32_t>& counts) { return rle_compress(counts); },
      py::arg("counts"));
  m.def(
      "rle_decompress",
      [](const std::string& s, int height, int width) {
        return rle_decompress(s, height, width).counts;
      },
      py::arg("encoded"), py::arg("height"), py::arg("width"));
  m.def(
      "polygons_to_mask",
      [](const std::vector<std::vector<double>>& rings, int width, int height) {
        return from_mask(polygons_to_mask(rings, width, height));
      },
      py::arg("rings"), py::arg("width"), py::arg("height"));

  m.def(
      "load_heatmap",
      [](const py::bytes& b) { return from_heatmap(load_heatmap(std::string(b))); },
      py::arg("data"));
  m.def(
      "upsample_bilinear",
      [](const py::array& h, int factor) {
        return from_heatmap(upsample_bilinear(to_heatmap(h), factor));
      },
      py::arg("heatmap"), py::arg("factor"));
  m.def(
      "extract_keypoints",
      [](const py::array& h, double tau, int top_k) {
        std::vector<std::tuple<int, int, double>> out;
        for (const auto& k : extract_keypoints(to_heatmap(h), tau, top_k))
          out.emplace_back(k.x, k.y, k.score);
        return out;
      },
      py::arg("heatmap"), py::arg("tau") = 0.05, py::arg("top_k") = 1024);

  m.def(
      "iqr_keep_indices",
      [](const std::vector<std::int64_t>& areas, double multiplier, const std::string& method) {
        IqrOptions o;
        o.multiplier = multiplier;
        o.method = parse_percentile_method(method);
        return iqr_keep_indices(areas, o);
      },
      py::arg("areas"), py::arg("multiplier") = 1.5, py::arg("method") = "linear");

  m.def(
      "vcc",
      [](const std::vector<py::array>& berries, const py::array& cluster, const std::string& mode) {
        const auto c = to_mask(cluster);
        if (berries.empty()) return vcc(MaskSet{}, c, parse_closure_mode(mode));
        return vcc(to_mask_set(berries), c, parse_closure_mode(mode));
      },
      py::arg("berries"), py::arg("cluster"), py::arg("mode") = "clipped");

  m.def(
      "eval_model",
      [](double asym, double r0, double rate, double t) {
        return eval_model({asym, r0, rate}, t);
      },
      py::arg("asym"), py::arg("r0"), py::arg("rate"), py::arg("t"));
  m.def(
      "fit_asymptotic",
      [](const std::vector<double>& t, const std::vector<double>& y) {
        if (t.size() != y.size()) throw ArgumentError("t and y differ in length");
        std::vector<FitPoint> pts;
        for (std::size_t i = 0; i < t.size(); ++i) pts.push_back({t[i], y[i]});
        FitResult r;
        {
          py::gil_scoped_release nogil;
          r = fit_asymptotic(pts);
        }
        return fit_dict(r);
      },
      py::arg("t"), py::arg("y"));
  m.def(
      "time_to_fraction",
      [](double asym, double r0, double rate, double p) {
        return time_to_fraction({asym, r0, rate}, p);
      },
      py::arg("asym"), py::arg("r0"), py::arg("rate"), py::arg("p") = 0.95);

  // dets: (image_id, id, mask, score); gts: (image_id, id, mask).
  m.def(
      "average_precision",
      [](const std::vector<std::tuple<std::int64_t, std::int64_t, py::array, double>>& dets,
         const std::vector<std::tuple<std::int64_t, std::int64_t, py::array>>& gts,
         int max_detections) {
        std::vector<Detection> d;
        std::vector<GroundTruth> g;
        for (const auto& [im, id, mask, score] : dets) d.push_back({im, id, to_mask(mask), score});
        for (const auto& [im, id, mask] : gts) g.push_back({im, id, to_mask(mask)});
        ApOptions o;
        o.max_detections = max_detections;
        const auto r = average_precision(d, g, o);
        py::dict out;
        out["thresholds"] = r.thresholds;
        out["per_threshold"] = r.per_threshold;
        out["map"] = r.map;
        out["ap50"] = r.ap50;
        out["ap75"] = r.ap75;
        out["ap_small"] = r.ap_small;
        out["ap_medium"] = r.ap_medium;
        out["ap_large"] = r.ap_large;
        return out;
      },
      py::arg("detections"), py::arg("ground_truth"), py::arg("max_detections") = 0);
  m.def(
      "miou",
      [](const std::vector<std::int32_t>& pred, const std::vector<std::int32_t>& gt, int n) {
        return miou(pred, gt, n);
      },
      py::arg("pred"), py::arg("gt"), py::arg("n_classes"));
}
