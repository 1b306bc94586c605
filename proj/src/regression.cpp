#include "grapeclose/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grapeclose/error.hpp"

namespace grapeclose {

double eval_model(const AsymptoticModel& m, double t) {
  const double decay = std::exp(-m.rate * t);
  const double gain = -std::expm1(-m.rate * t);
  return m.asym * gain + m.r0 * decay;
}

std::array<double, 3> model_gradient(const AsymptoticModel& m, double t) {
  const double decay = std::exp(-m.rate * t);
  return {-std::expm1(-m.rate * t), decay, -t * (m.r0 - m.asym) * decay};
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::kConverged: return "converged";
    case FitStatus::kMaxIterations: return "max-iterations";
    case FitStatus::kStalled: return "stalled";
    case FitStatus::kUnidentifiable: return "unidentifiable";
  }
  return "unknown";
}

double residual_sum_squares(const AsymptoticModel& m,
                            std::span<const FitPoint> points) {
  double rss = 0.0;
  for (const auto& p : points) {
    const double r = p.y - eval_model(m, p.t);
    rss += r * r;
  }
  return rss;
}

namespace {

double softplus(double u) {
  return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double softplus_inv(double k) { return k + std::log(-std::expm1(-k)); }

double sigmoid(double u) {
  return u >= 0 ? 1.0 / (1.0 + std::exp(-u))
                : std::exp(u) / (1.0 + std::exp(u));
}

std::vector<FitPoint> checked_sorted(std::span<const FitPoint> points) {
  std::vector<FitPoint> pts(points.begin(), points.end());
  for (const auto& p : pts) {
    if (!std::isfinite(p.t) || !std::isfinite(p.y)) {
      throw ArgumentError("fit points must be finite");
    }
  }
  std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) {
    return a.t != b.t ? a.t < b.t : a.y < b.y;
  });
  std::set<double> times;
  for (const auto& p : pts) times.insert(p.t);
  if (pts.size() < 4 || times.size() < 3) {
    throw ArgumentError("asymptotic fit needs >= 4 points over >= 3 distinct times");
  }
  return pts;
}

AsymptoticModel self_start_sorted(const std::vector<FitPoint>& pts) {
  double ymin = pts.front().y, ymax = pts.front().y;
  for (const auto& p : pts) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double range = ymax - ymin;
  AsymptoticModel m;
  m.asym = ymax + 0.05 * range;

  const double t0 = pts.front().t;
  double first_sum = 0.0;
  int first_n = 0;
  for (const auto& p : pts) {
    if (p.t != t0) break;
    first_sum += p.y;
    ++first_n;
  }
  m.r0 = first_sum / first_n;

  // log((asym - y) / (asym - r0)) = -rate * (t - t0) for exact data.
  double st = 0, sz = 0, stt = 0, stz = 0;
  const double denom = m.asym - m.r0;
  for (const auto& p : pts) {
    const double z = std::log((m.asym - p.y) / denom);
    st += p.t;
    sz += z;
    stt += p.t * p.t;
    stz += p.t * z;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * stz - st * sz) / (n * stt - st * st);
  m.rate = -slope;
  if (!(m.rate > 0) || !std::isfinite(m.rate)) {
    m.rate = 1.0 / (pts.back().t - pts.front().t);
  }
  return m;
}

}  // namespace

AsymptoticModel self_start(std::span<const FitPoint> points) {
  const auto pts = checked_sorted(points);
  if (pts.front().y == pts.back().y &&
      std::all_of(pts.begin(), pts.end(),
                  [&](const FitPoint& p) { return p.y == pts.front().y; })) {
    throw FitFailure("flat data: rate is not identifiable");
  }
  return self_start_sorted(pts);
}

FitResult fit_asymptotic(std::span<const FitPoint> points,
                         const FitOptions& opts) {
  const auto pts = checked_sorted(points);
  FitResult result;

  const bool flat = std::all_of(pts.begin(), pts.end(), [&](const FitPoint& p) {
    return p.y == pts.front().y;
  });
  if (flat) {
    result.model = {pts.front().y, pts.front().y, 0.0};
    result.initial = result.model;
    result.status = FitStatus::kUnidentifiable;
    return result;
  }

  result.initial = self_start_sorted(pts);
  result.initial_rss = residual_sum_squares(result.initial, pts);

  using Vec3 = Eigen::Vector3d;
  using Mat3 = Eigen::Matrix3d;
  auto to_model = [](const Vec3& th) {
    return AsymptoticModel{th[0], th[1], softplus(th[2])};
  };

  Vec3 theta(result.initial.asym, result.initial.r0,
             softplus_inv(result.initial.rate));
  double rss = result.initial_rss;
  double lambda = opts.lambda0;
  result.status = FitStatus::kMaxIterations;

  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const AsymptoticModel m = to_model(theta);
    const double dk_du = sigmoid(theta[2]);
    Mat3 jtj = Mat3::Zero();
    Vec3 jtr = Vec3::Zero();
    for (const auto& p : pts) {
      const auto g = model_gradient(m, p.t);
      const Vec3 row(g[0], g[1], g[2] * dk_du);
      const double r = p.y - eval_model(m, p.t);
      jtj += row * row.transpose();
      jtr += row * r;
    }
    if (jtr.lpNorm<Eigen::Infinity>() < opts.grad_tol) {
      result.status = FitStatus::kConverged;
      break;
    }

    bool accepted = false;
    bool done = false;
    while (!accepted) {
      Mat3 a = jtj;
      for (int d = 0; d < 3; ++d) {
        a(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      }
      const Vec3 step = a.ldlt().solve(jtr);
      const Vec3 cand = theta + step;
      const double cand_rss = residual_sum_squares(to_model(cand), pts);
      if (std::isfinite(cand_rss) && cand_rss < rss) {
        const double rel = (rss - cand_rss) / rss;
        theta = cand;
        rss = cand_rss;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel < opts.rss_rel_tol) {
          result.status = FitStatus::kConverged;
          done = true;
        }
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          result.status = FitStatus::kStalled;
          done = true;
          break;
        }
      }
    }
    if (done) {
      ++iter;
      break;
    }
  }

  result.model = to_model(theta);
  result.rss = rss;
  result.iterations = iter;
  result.converged = result.status == FitStatus::kConverged;
  if (!(result.model.rate > 0.0) || !std::isfinite(result.model.rate)) {
    throw FitFailure("rate collapsed to " + std::to_string(result.model.rate) +
                     " after " + std::to_string(iter) + " iterations (rss " +
                     std::to_string(rss) + ")");
  }
  return result;
}

double time_to_fraction(const AsymptoticModel& m, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("fraction must be in (0, 1)");
  if (!(m.rate > 0.0) || !std::isfinite(m.rate)) {
    throw ArgumentError("model rate must be positive");
  }
  if (m.r0 == m.asym) throw ArgumentError("degenerate model: r0 equals asymptote");
  return -std::log1p(-p) / m.rate;
}

}  // namespace grapeclose
