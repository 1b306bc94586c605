#pragma once

#include <array>
#include <span>
#include <string_view>

namespace grapeclose {

/// Closure progress y(t) = asym + (r0 - asym) * exp(-rate * t), t in weeks.
struct AsymptoticModel {
  double asym = 0.0;  // percent
  double r0 = 0.0;    // percent at t = 0
  double rate = 0.0;  // per week, > 0

  friend bool operator==(const AsymptoticModel&, const AsymptoticModel&) = default;
};

/// Exact at both ends: returns r0 at t = 0 and asym as t -> infinity.
double eval_model(const AsymptoticModel& m, double t);

/// Partial derivatives of y(t) with respect to (asym, r0, rate).
std::array<double, 3> model_gradient(const AsymptoticModel& m, double t);

struct FitPoint {
  double t = 0.0;
  double y = 0.0;
};

enum class FitStatus {
  kConverged,
  kMaxIterations,
  kStalled,         // damping exhausted without meeting a stopping rule
  kUnidentifiable,  // flat data; rate carries no information and is 0
};

std::string_view to_string(FitStatus s);

struct FitOptions {
  int max_iterations = 500;
  double rss_rel_tol = 1e-10;
  double grad_tol = 1e-8;
  double lambda0 = 1e-3;
};

struct FitResult {
  AsymptoticModel model;
  AsymptoticModel initial;
  double rss = 0.0;
  double initial_rss = 0.0;
  int iterations = 0;
  bool converged = false;
  FitStatus status = FitStatus::kMaxIterations;
};

/// Deterministic starting point: asymptote slightly above the data maximum,
/// intercept from the earliest observations, rate from a log-linear OLS.
AsymptoticModel self_start(std::span<const FitPoint> points);

/// Levenberg-Marquardt least squares with the rate optimized through a
/// softplus so it stays positive. Needs >= 4 points over >= 3 distinct
/// times (ArgumentError otherwise); throws FitFailure if the rate collapses.
FitResult fit_asymptotic(std::span<const FitPoint> points,
                         const FitOptions& opts = {});

double residual_sum_squares(const AsymptoticModel& m,
                            std::span<const FitPoint> points);

/// Time at which the curve has covered fraction p of the way from r0 to the
/// asymptote: -ln(1 - p) / rate.
double time_to_fraction(const AsymptoticModel& m, double p = 0.95);

}  // namespace grapeclose
