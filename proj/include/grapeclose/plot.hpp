#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grapeclose/regression.hpp"

namespace grapeclose {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Tukey box: quartiles by linear interpolation, whiskers at the most
/// extreme data within `whisker` * IQR of the box.
struct BoxStats {
  std::size_t n = 0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  std::vector<double> outliers;  // ascending
};

/// Throws ArgumentError on an empty sample.
BoxStats boxplot_stats(std::span<const double> values, double whisker = 1.5);

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

/// Side-by-side boxes on a shared linear axis.
std::string boxplot_svg(const std::vector<BoxGroup>& groups,
                        std::string_view title, std::string_view y_label);

struct Histogram {
  std::string title;
  std::vector<std::size_t> counts;  // counts[k] = images with k instances
};

/// One bar-chart panel per histogram, stacked vertically.
std::string histogram_svg(const std::vector<Histogram>& panels,
                          std::string_view x_label);

/// Scatter of observations with the fitted curve drawn over them.
std::string closure_curve_svg(std::span<const FitPoint> points,
                              const AsymptoticModel& model,
                              std::string_view title);

}  // namespace grapeclose
