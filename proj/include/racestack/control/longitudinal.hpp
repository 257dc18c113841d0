#pragma once
#include <optional>

#include "racestack/behavior/spliner.hpp"
#include "racestack/opponent/tracker.hpp"
#include "racestack/track/frenet.hpp"

namespace rs::control {

struct LongitudinalParams {
  double t_la = 0.25;        // s, lookahead time
  double lambda_lat = 1.0;   // [0, 1], lateral-deviation speed reduction
  double k_p = 1.0;          // trailing P gain
  double k_d = 0.2;          // trailing D gain
  double v_blind = 1.5;      // m/s, floor when trailing without sight
  double gap_target = 2.0;   // m, reference trailing gap
  double d_track = 1.0;      // m, lateral-error normalization
  double curvlim = 1.0;      // 1/m, curvature normalization
};

// Velocity from the local trajectory at a lookahead point, scaled down by
// the lateral-deviation heuristic v_des = (1 + lambda*(-1 + exp(-dn*cn))) * v_ref.
// The lookahead s is rounded onto the 0.1 m profile grid before the lookup.
double nominal_velocity(const track::FrenetPose& ego, const behavior::LocalTrajectory& traj,
                        const track::FrenetFrame& frame, const LongitudinalParams& p);

// Gap-keeping law behind an opponent: feedforward of the opponent speed with
// PD correction on the wrapped gap error. Without line of sight the command
// is floored at v_blind so the car keeps moving toward a better view; with
// the obstacle in sight the law may brake all the way to a stop.
double trailing_velocity(const track::FrenetPose& ego, double opp_s, double opp_v_s,
                         double s_max, const LongitudinalParams& p, bool in_los = false);

struct TrailingTarget {
  double s = 0.0;
  double v_s = 0.0;
  bool is_dynamic = false;
};

// Target selection among tracked obstacles: nearest ahead wins; dynamic
// obstacles are preferred over static ones when both are present.
std::optional<TrailingTarget> select_trailing_target(
    const track::FrenetPose& ego, const opponent::OpponentEstimate& opp,
    const std::vector<opponent::StaticObstacle>& statics, double s_max, double horizon);

}  // namespace rs::control
