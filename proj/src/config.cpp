#include "grapeclose/config.hpp"

#include <json.hpp>

#include "grapeclose/error.hpp"

namespace grapeclose {

using nlohmann::json;

FitInput parse_fit_input(std::string_view s) {
  if (s == "points") return FitInput::kPoints;
  if (s == "means") return FitInput::kMeans;
  throw ArgumentError("fit input must be 'points' or 'means'");
}

std::string_view to_string(FitInput f) {
  return f == FitInput::kPoints ? "points" : "means";
}

namespace {

template <typename T>
T get(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("config key '") + key + "' has the wrong type");
  }
}

void check(const RunConfig& c) {
  if (!(c.tau >= 0.0 && c.tau < 1.0)) throw ArgumentError("tau must be in [0, 1)");
  if (c.top_k < 1) throw ArgumentError("top_k must be >= 1");
  if (c.upsample_factor < 1) throw ArgumentError("upsample_factor must be >= 1");
  if (!(c.iqr_multiplier >= 0.0)) throw ArgumentError("iqr_multiplier must be >= 0");
  if (!(c.fraction_p > 0.0 && c.fraction_p < 1.0)) {
    throw ArgumentError("fraction_p must be in (0, 1)");
  }
  if (c.max_detections < 0) throw ArgumentError("max_detections must be >= 0");
}

}  // namespace

RunConfig RunConfig::from_json(std::string_view json_text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed config JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw FormatError("config must be a JSON object");
  RunConfig c = base;
  for (const auto& [key, v] : doc.items()) {
    const char* k = key.c_str();
    if (key == "tau") c.tau = get<double>(v, k);
    else if (key == "top_k") c.top_k = get<int>(v, k);
    else if (key == "upsample_factor") c.upsample_factor = get<int>(v, k);
    else if (key == "iqr_multiplier") c.iqr_multiplier = get<double>(v, k);
    else if (key == "percentile_method")
      c.percentile_method = parse_percentile_method(get<std::string>(v, k));
    else if (key == "closure_mode")
      c.closure_mode = parse_closure_mode(get<std::string>(v, k));
    else if (key == "iqr_scope") c.iqr_scope = parse_iqr_scope(get<std::string>(v, k));
    else if (key == "aggregation")
      c.aggregation = parse_aggregation(get<std::string>(v, k));
    else if (key == "fit_input") c.fit_input = parse_fit_input(get<std::string>(v, k));
    else if (key == "fraction_p") c.fraction_p = get<double>(v, k);
    else if (key == "max_detections") c.max_detections = get<int>(v, k);
    else if (key == "miou_score_threshold") c.miou_score_threshold = get<double>(v, k);
    else throw FormatError("unknown config key '" + key + "'");
  }
  check(c);
  return c;
}

RunConfig RunConfig::from_json(std::string_view json_text) {
  return from_json(json_text, RunConfig{});
}

std::string RunConfig::to_json() const {
  json j = {
      {"tau", tau},
      {"top_k", top_k},
      {"upsample_factor", upsample_factor},
      {"iqr_multiplier", iqr_multiplier},
      {"percentile_method", std::string(to_string(percentile_method))},
      {"closure_mode", std::string(to_string(closure_mode))},
      {"iqr_scope", std::string(to_string(iqr_scope))},
      {"aggregation", std::string(to_string(aggregation))},
      {"fit_input", std::string(to_string(fit_input))},
      {"fraction_p", fraction_p},
      {"max_detections", max_detections},
      {"miou_score_threshold", miou_score_threshold},
  };
  return j.dump(2);
}

}  // namespace grapeclose
