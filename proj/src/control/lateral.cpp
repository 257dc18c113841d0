#include "racestack/control/lateral.hpp"

#include <algorithm>
#include <cmath>

namespace rs::control {
namespace {

double bearing_error(const track::Pose2D& pose, double tx, double ty) {
  return wrap_to_pi(std::atan2(ty - pose.y, tx - pose.x) - pose.psi);
}

}  // namespace

void lookahead_point(const behavior::LocalTrajectory& traj, const track::FrenetFrame& frame,
                     double s_ego, double l_d, double& x, double& y) {
  const double s_target = track::wrap_s(s_ego + l_d, frame.s_max());
  const double step = frame.line().step;
  const std::size_t idx =
      static_cast<std::size_t>(std::llround(s_target / step)) % traj.s.size();
  x = traj.x[idx];
  y = traj.y[idx];
}

double map_steering(const track::Pose2D& pose, double v_x,
                    const behavior::LocalTrajectory& traj, const track::FrenetFrame& frame,
                    double s_ego, const SteeringLookupTable& lut, const LateralParams& p,
                    LateralDebug* dbg) {
  const double l_d = std::max(p.l_d_floor, p.m * v_x + p.q);
  double tx, ty;
  lookahead_point(traj, frame, s_ego, l_d, tx, ty);
  const double eta = bearing_error(pose, tx, ty);
  const double a_c = 2.0 * v_x * v_x / l_d * std::sin(eta);

  bool saturated = false;
  const double delta = lut.steering_for(std::clamp(v_x, 0.5, 7.0), a_c, &saturated);
  if (dbg) {
    dbg->lookahead = l_d;
    dbg->eta = eta;
    dbg->a_c = a_c;
    dbg->saturated = saturated;
  }
  return std::clamp(delta, -p.delta_max, p.delta_max);
}

double pure_pursuit_steering(const track::Pose2D& pose, double v_x,
                             const behavior::LocalTrajectory& traj,
                             const track::FrenetFrame& frame, double s_ego,
                             const LateralParams& p, LateralDebug* dbg) {
  const double l_d = std::max(p.l_d_floor, p.m * v_x + p.q);
  double tx, ty;
  lookahead_point(traj, frame, s_ego, l_d, tx, ty);
  const double eta = bearing_error(pose, tx, ty);
  const double delta = std::atan(2.0 * p.wheelbase * std::sin(eta) / l_d);
  if (dbg) {
    dbg->lookahead = l_d;
    dbg->eta = eta;
    dbg->a_c = 2.0 * v_x * v_x / l_d * std::sin(eta);
    dbg->saturated = false;
  }
  return std::clamp(delta, -p.delta_max, p.delta_max);
}

}  // namespace rs::control
