#include "racestack/planner/velocity_profile.hpp"

#include <algorithm>
#include <cmath>

namespace rs::planner {
namespace {

double accel_available(double v, double kappa, const PlannerParams& p) {
  const double usage = v * v * std::abs(kappa) / p.a_lat_max;
  return p.a_long_max * std::sqrt(std::max(0.0, 1.0 - usage * usage));
}

}  // namespace

std::vector<double> velocity_profile(const std::vector<double>& kappa, double step,
                                     const PlannerParams& params, bool closed) {
  const std::size_t n = kappa.size();
  if (n < 2) throw PlannerError("velocity_profile: too few points");
  constexpr double kEps = 1e-6;

  std::vector<double> v(n);
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::min(params.v_max, std::sqrt(params.a_lat_max / std::max(std::abs(kappa[i]), kEps)));
    if (v[i] < v[start]) start = i;
  }

  for (int sweep = 0; sweep < 3; ++sweep) {
    bool changed = false;

    // Forward: acceleration limit. For a closed loop the pass wraps once
    // around starting from the slowest point.
    const std::size_t begin = closed ? start : 0;
    for (std::size_t c = 0; c + 1 < n + (closed ? 1 : 0); ++c) {
      const std::size_t i = (begin + c) % n;
      const std::size_t j = (i + 1) % n;
      if (!closed && j == 0) break;
      const double a = accel_available(v[i], kappa[i], params);
      const double cap = std::sqrt(v[i] * v[i] + 2.0 * a * step);
      if (v[j] > cap + 1e-12) {
        v[j] = cap;
        changed = true;
      }
    }

    // Backward: braking limit.
    for (std::size_t c = 0; c + 1 < n + (closed ? 1 : 0); ++c) {
      const std::size_t i = (begin + n - c % n) % n;
      const std::size_t j = (i + n - 1) % n;
      if (!closed && i == 0) break;
      const double a = accel_available(v[i], kappa[i], params);
      const double cap = std::sqrt(v[i] * v[i] + 2.0 * a * step);
      if (v[j] > cap + 1e-12) {
        v[j] = cap;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return v;
}

void fill_velocity_profile(track::Raceline& line, const PlannerParams& params) {
  line.v = velocity_profile(line.kappa, line.step, params, line.closed);
}

}  // namespace rs::planner
