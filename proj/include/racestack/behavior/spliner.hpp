#pragma once
#include <array>
#include <optional>
#include <vector>

#include "racestack/opponent/tracker.hpp"
#include "racestack/track/frenet.hpp"

namespace rs::behavior {

struct SplinerParams {
  int n_spline = 3;
  std::array<double, 3> delta_preapex = {2.0, 3.0, 4.0};    // m, non-decreasing
  std::array<double, 3> delta_postapex = {4.5, 5.0, 5.5};   // m
  double delta_apex = 0.4;   // m, extra lateral clearance at the apex
  double w_ego = 0.30;       // m
  double w_opp = 0.30;       // m
  double d_track_margin = 0.1;  // m, shaved off the half-width for d_track
  double v_max = 7.0;        // m/s, velocity scaler reference
};

// Local overtaking trajectory in both frames; source tells the controller
// whether it is tracking the global line or a spliced spline.
struct LocalTrajectory {
  std::vector<double> s, d, x, y, v;
  bool is_spline = false;
  bool valid = false;
  double splice_begin = 0.0;  // s range replaced by the spline
  double splice_end = 0.0;
  double apex_d = 0.0;
  int side = 0;  // +1 left, -1 right
};

// Velocity-dependent stretch of the anchor spacing: 1 + min(v/v_max, 0.5).
double velocity_scaler(double v_s_ego, double v_max);

// Lateral apex offset next to the opponent for the chosen side.
double apex_offset(double d_opp, int side, const SplinerParams& p);

// Builds the overtaking trajectory around the tracked opponent: anchor
// points on the raceline before and after the apex, a cubic spline through
// them in (s, d), resampled at the raceline step and spliced into the global
// line. Returns an invalid trajectory when neither side leaves enough room.
LocalTrajectory plan_overtake(const opponent::OpponentEstimate& opp,
                              const track::FrenetPose& ego, const track::FrenetFrame& frame,
                              const SplinerParams& params);

// Trajectory selection per behavior state: the spline while overtaking, the
// global raceline otherwise.
LocalTrajectory global_as_trajectory(const track::FrenetFrame& frame);

}  // namespace rs::behavior
