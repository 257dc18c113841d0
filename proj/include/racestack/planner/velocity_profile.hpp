#pragma once
#include <vector>

#include "racestack/planner/min_curvature.hpp"
#include "racestack/track/types.hpp"

namespace rs::planner {

// Curvature-limited seed refined by cyclic forward (acceleration) and
// backward (braking) passes. Longitudinal headroom follows the friction
// circle: a_avail = a_long_max * sqrt(1 - (v^2 k / a_lat_max)^2).
std::vector<double> velocity_profile(const std::vector<double>& kappa, double step,
                                     const PlannerParams& params, bool closed = true);

// Convenience overload filling raceline.v in place.
void fill_velocity_profile(track::Raceline& line, const PlannerParams& params);

}  // namespace rs::planner
