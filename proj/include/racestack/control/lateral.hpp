#pragma once
#include "racestack/behavior/spliner.hpp"
#include "racestack/control/steering_lut.hpp"
#include "racestack/track/frenet.hpp"

namespace rs::control {

struct LateralParams {
  double m = 0.6;           // s, lookahead distance slope (L_d = m v + q)
  double q = -0.18;         // m, offset
  double l_d_floor = 0.1;   // m
  double wheelbase = 0.33;  // m, pure pursuit
  double delta_max = 0.4;   // rad
};

struct LateralDebug {
  double lookahead = 0.0;
  double eta = 0.0;
  double a_c = 0.0;
  bool saturated = false;
};

// Point on the trajectory at arc distance L_d ahead of the ego s position.
void lookahead_point(const behavior::LocalTrajectory& traj, const track::FrenetFrame& frame,
                     double s_ego, double l_d, double& x, double& y);

// Acceleration-based pursuit: a_c = 2 v^2 sin(eta) / L_d mapped through the
// steady-state steering table, sign copied from eta, clamped to the stable
// region edge.
double map_steering(const track::Pose2D& pose, double v_x,
                    const behavior::LocalTrajectory& traj, const track::FrenetFrame& frame,
                    double s_ego, const SteeringLookupTable& lut, const LateralParams& p,
                    LateralDebug* dbg = nullptr);

// Geometric baseline: delta = atan(2 L sin(eta) / L_d) with the same
// lookahead law.
double pure_pursuit_steering(const track::Pose2D& pose, double v_x,
                             const behavior::LocalTrajectory& traj,
                             const track::FrenetFrame& frame, double s_ego,
                             const LateralParams& p, LateralDebug* dbg = nullptr);

}  // namespace rs::control
