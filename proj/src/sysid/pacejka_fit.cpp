#include "racestack/sysid/pacejka_fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rs::sysid {
namespace {

using Eigen::Matrix4d;
using Eigen::Vector4d;

double magic(double alpha, const Vector4d& p) {
  const double ba = p(0) * alpha;
  const double u = ba - p(3) * (ba - std::atan(ba));
  return p(2) * std::sin(p(1) * std::atan(u));
}

// Analytic Jacobian row d f / d (B, C, D, E).
Vector4d magic_grad(double alpha, const Vector4d& p) {
  const double b = p(0), c = p(1), d = p(2), e = p(3);
  const double ba = b * alpha;
  const double atan_ba = std::atan(ba);
  const double u = ba - e * (ba - atan_ba);
  const double atan_u = std::atan(u);
  const double outer = d * std::cos(c * atan_u) * c / (1.0 + u * u);
  Vector4d g;
  const double du_db = alpha - e * (alpha - alpha / (1.0 + ba * ba));
  g(0) = outer * du_db;
  g(1) = d * std::cos(c * atan_u) * atan_u;
  g(2) = std::sin(c * atan_u);
  g(3) = outer * (atan_ba - ba);
  return g;
}

struct Bounds {
  Vector4d lo, hi;
};

Vector4d project(Vector4d p, const Bounds& b) {
  for (int i = 0; i < 4; ++i) p(i) = std::clamp(p(i), b.lo(i), b.hi(i));
  return p;
}

double cost(const std::vector<double>& alpha, const std::vector<double>& force,
            const Vector4d& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double r = magic(alpha[i], p) - force[i];
    acc += r * r;
  }
  return acc;
}

// Projected Levenberg-Marquardt with analytic Jacobian. Deterministic: fixed
// initialization, fixed damping schedule.
Vector4d solve_lm(const std::vector<double>& alpha, const std::vector<double>& force,
                  Vector4d p, const Bounds& bounds, int max_iter) {
  double lambda = 1e-3;
  double current = cost(alpha, force, p);
  for (int iter = 0; iter < max_iter; ++iter) {
    Matrix4d jtj = Matrix4d::Zero();
    Vector4d jtr = Vector4d::Zero();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const Vector4d g = magic_grad(alpha[i], p);
      const double r = magic(alpha[i], p) - force[i];
      jtj += g * g.transpose();
      jtr += g * r;
    }
    Matrix4d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-9);
    const Vector4d step = damped.ldlt().solve(-jtr);
    const Vector4d trial = project(p + step, bounds);
    const double trial_cost = cost(alpha, force, trial);
    if (trial_cost < current) {
      if (current - trial_cost < 1e-12 * (1.0 + current)) {
        p = trial;
        break;
      }
      p = trial;
      current = trial_cost;
      lambda = std::max(lambda / 3.0, 1e-9);
    } else {
      lambda *= 4.0;
      if (lambda > 1e9) break;
    }
  }
  return p;
}

}  // namespace

FitResult fit_pacejka(const CorneringDataset& data, Axle axle, const FitConfig& cfg) {
  std::vector<double> alpha, force;
  for (const auto& s : data.samples) {
    alpha.push_back(axle == Axle::kFront ? s.alpha_f : s.alpha_r);
    force.push_back(axle == Axle::kFront ? s.f_yf : s.f_yr);
  }
  if (alpha.size() < cfg.min_samples)
    throw FitDegenerateError("fit_pacejka: too few samples", 0.0);

  double coverage = 0.0;
  for (double a : alpha) coverage = std::max(coverage, std::abs(a));
  if (coverage < cfg.min_alpha_coverage)
    throw FitDegenerateError("fit_pacejka: slip-angle coverage too small (" +
                                 std::to_string(coverage) + " rad)",
                             coverage);

  const double c_cap = axle == Axle::kFront ? cfg.c_cap_front : cfg.c_cap_rear;
  const double e_cap = axle == Axle::kFront ? cfg.e_cap_front : cfg.e_cap_rear;
  Bounds bounds;
  bounds.lo << 0.5, 0.1, 0.5, -5.0;
  bounds.hi << 40.0, c_cap, 200.0, e_cap;

  // Initialization: peak force from the gravity share of the axle load.
  double peak = 0.0;
  for (double f : force) peak = std::max(peak, std::abs(f));
  Vector4d p;
  p << 5.0, 1.3, std::max(peak, 1.0), 0.0;
  p = project(p, bounds);

  FitResult result;
  std::vector<double> in_alpha = alpha, in_force = force;
  p = solve_lm(in_alpha, in_force, p, bounds, cfg.max_lm_iterations);

  for (int k = 1; k <= cfg.em_passes; ++k) {
    const double threshold = cfg.em_base / std::pow(2.0, k);
    result.em_thresholds.push_back(threshold);
    std::vector<double> next_alpha, next_force;
    for (std::size_t i = 0; i < in_alpha.size(); ++i) {
      if (std::abs(magic(in_alpha[i], p) - in_force[i]) <= threshold) {
        next_alpha.push_back(in_alpha[i]);
        next_force.push_back(in_force[i]);
      }
    }
    if (next_alpha.size() < 8) break;  // never fit on a handful of points
    in_alpha.swap(next_alpha);
    in_force.swap(next_force);
    p = solve_lm(in_alpha, in_force, p, bounds, cfg.max_lm_iterations);
  }

  result.tire.B = p(0);
  result.tire.C = p(1);
  result.tire.D = p(2);
  result.tire.E = p(3);
  result.inliers = in_alpha.size();
  result.removed_outliers = alpha.size() - in_alpha.size();
  result.rms_residual = std::sqrt(cost(in_alpha, in_force, p) /
                                  static_cast<double>(std::max<std::size_t>(in_alpha.size(), 1)));
  return result;
}

}  // namespace rs::sysid
