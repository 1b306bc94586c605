#pragma once

#include <string>
#include <string_view>

#include "grapeclose/closure.hpp"
#include "grapeclose/maskops.hpp"

namespace grapeclose {

enum class FitInput { kPoints, kMeans };

FitInput parse_fit_input(std::string_view s);
std::string_view to_string(FitInput f);

/// Pipeline settings. Defaults are the published pipeline constants.
struct RunConfig {
  double tau = 0.05;
  int top_k = 1024;
  int upsample_factor = 8;
  double iqr_multiplier = 1.5;
  PercentileMethod percentile_method = PercentileMethod::kLinear;
  ClosureMode closure_mode = ClosureMode::kClipped;
  IqrScope iqr_scope = IqrScope::kImage;
  Aggregation aggregation = Aggregation::kClusterMean;
  FitInput fit_input = FitInput::kPoints;
  double fraction_p = 0.95;
  int max_detections = 0;
  double miou_score_threshold = 0.5;

  IqrOptions iqr_options() const {
    return {iqr_multiplier, 1e-9, percentile_method};
  }

  /// Overlays keys present in a JSON object onto `base`. Unknown keys are
  /// rejected. Throws FormatError / ArgumentError.
  static RunConfig from_json(std::string_view json_text, RunConfig base);
  static RunConfig from_json(std::string_view json_text);
  std::string to_json() const;
};

}  // namespace grapeclose
