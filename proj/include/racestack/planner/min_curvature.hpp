#pragma once
#include "racestack/planner/centerline.hpp"
#include "racestack/track/types.hpp"

namespace rs::planner {

struct PlannerParams {
  double curvlim = 1.0;                 // 1/m
  double iqp_curverror_allowed = 0.1;   // 1/m
  double width_opt = 0.8;               // m, vehicle width incl. safety
  double stepsize_reg = 0.2;            // m, optimization point spacing
  double step_out = 0.1;                // m, output raceline spacing
  int max_iter = 10;
  double a_lat_max = 5.0;               // m/s^2, velocity profile
  double a_long_max = 4.0;              // m/s^2
  double v_max = 7.0;                   // m/s
};

struct InfeasibleCorridorError : PlannerError {
  InfeasibleCorridorError(std::string msg, double s_begin_, double s_end_)
      : PlannerError(std::move(msg)), s_begin(s_begin_), s_end(s_end_) {}
  double s_begin = 0.0;  // offending arc range on the centerline
  double s_end = 0.0;
};

struct MinCurvatureResult {
  track::Raceline raceline;      // geometry + widths, velocity left at zero
  std::vector<double> alpha;     // cumulative lateral shift per input point
  double max_kappa = 0.0;
  double max_lin_error = 0.0;    // linearization error of the last iterate
  int iterations = 0;
  bool converged = false;
};

// Iterative linearized minimum-curvature optimization in lateral offsets.
// Each pass fits periodic cubic splines through the current reference points,
// linearizes the squared-curvature objective in the point offsets along the
// normals, and solves the resulting box-constrained QP with an active-set
// method. Iterates until the linearization error drops below
// iqp_curverror_allowed and max curvature is within curvlim (or max_iter).
MinCurvatureResult min_curvature_qp(const Centerline& center, const PlannerParams& params);

}  // namespace rs::planner
