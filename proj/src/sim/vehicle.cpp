#include "racestack/sim/vehicle.hpp"

#include <algorithm>
#include <cmath>

namespace rs::sim {
namespace {

struct Derivs {
  double dx, dy, dpsi, dvx, dvy, domega, ddelta;
};

struct OdeState {
  double x, y, psi, v_x, v_y, omega, delta;
};

Derivs dynamics(const OdeState& s, const DriveCommand& cmd, const SingleTrackParams& p,
                double* ax_out = nullptr, double* ay_out = nullptr) {
  Derivs d{};
  d.dx = s.v_x * std::cos(s.psi) - s.v_y * std::sin(s.psi);
  d.dy = s.v_x * std::sin(s.psi) + s.v_y * std::cos(s.psi);
  d.dpsi = s.omega;

  // Actuators: steering servo (first-order, rate limited) and drive P loop.
  const double delta_des = std::clamp(cmd.delta_des, -p.delta_max, p.delta_max);
  d.ddelta = std::clamp((delta_des - s.delta) / p.steer_tau, -p.v_steer_max, p.v_steer_max);
  const double a_cmd = std::clamp(p.drive_gain * (cmd.v_des - s.v_x), -p.a_long_max, p.a_long_max);

  const double L = p.wheelbase();
  const double w = clamp01(s.v_x / p.v_blend);

  // Dynamic single track (valid weight w).
  double dvx_dyn = 0.0, dvy_dyn = 0.0, domega_dyn = 0.0;
  if (w > 0.0) {
    const double vx_safe = std::max(s.v_x, 1e-3);
    const double alpha_f = s.delta - std::atan((s.v_y + p.l_f * s.omega) / vx_safe);
    const double alpha_r = -std::atan((s.v_y - p.l_r * s.omega) / vx_safe);
    const double F_yf = p.mu_scale * p.tire_front.force(alpha_f);
    const double F_yr = p.mu_scale * p.tire_rear.force(alpha_r);
    const double cd = std::cos(s.delta), sd = std::sin(s.delta);
    dvx_dyn = a_cmd - (F_yf * sd) / p.m + s.v_y * s.omega;
    dvy_dyn = (F_yf * cd + F_yr) / p.m - s.v_x * s.omega;
    domega_dyn = (p.l_f * F_yf * cd - p.l_r * F_yr) / p.I_zz;
  }

  // Kinematic bicycle relaxation (weight 1-w): v_y and omega track their
  // kinematic values with a short time constant.
  const double beta = std::atan(p.l_r * std::tan(s.delta) / L);
  const double omega_kin = s.v_x * std::tan(s.delta) * std::cos(beta) / L;
  const double vy_kin = s.v_x * std::tan(beta);
  const double tau_kin = 0.02;
  const double dvx_kin = a_cmd;
  const double dvy_kin = (vy_kin - s.v_y) / tau_kin;
  const double domega_kin = (omega_kin - s.omega) / tau_kin;

  d.dvx = w * dvx_dyn + (1.0 - w) * dvx_kin;
  d.dvy = w * dvy_dyn + (1.0 - w) * dvy_kin;
  d.domega = w * domega_dyn + (1.0 - w) * domega_kin;

  if (ax_out) *ax_out = d.dvx - s.v_y * s.omega;
  if (ay_out) *ay_out = d.dvy + s.v_x * s.omega;
  return d;
}

OdeState advance(const OdeState& s, const Derivs& d, double h) {
  return {s.x + h * d.dx,       s.y + h * d.dy,        s.psi + h * d.dpsi,
          s.v_x + h * d.dvx,    s.v_y + h * d.dvy,     s.omega + h * d.domega,
          s.delta + h * d.ddelta};
}

}  // namespace

void slip_angles(const CarState& state, const SingleTrackParams& params, double& alpha_f,
                 double& alpha_r) {
  if (state.v_x < params.v_blend) {
    alpha_f = alpha_r = 0.0;
    return;
  }
  alpha_f = state.delta - std::atan((state.v_y + params.l_f * state.yaw_rate) / state.v_x);
  alpha_r = -std::atan((state.v_y - params.l_r * state.yaw_rate) / state.v_x);
}

CarState step_dynamics(const CarState& state, const DriveCommand& cmd, double dt,
                       const SingleTrackParams& params, BodyAccel* accel_out) {
  if (!(dt > 0.0) || dt > 5e-3) throw SimError("step_dynamics: dt must be in (0, 5 ms]");
  if (!std::isfinite(cmd.v_des) || !std::isfinite(cmd.delta_des))
    throw SimError("step_dynamics: non-finite command");
  if (!std::isfinite(state.pose.x) || !std::isfinite(state.pose.y) ||
      !std::isfinite(state.v_x) || !std::isfinite(state.v_y) ||
      !std::isfinite(state.yaw_rate))
    throw SimError("step_dynamics: non-finite state");
  if (!params.valid()) throw SimError("step_dynamics: invalid vehicle parameters");

  OdeState s0{state.pose.x, state.pose.y, state.pose.psi,
              state.v_x,    state.v_y,    state.yaw_rate, state.delta};

  const Derivs k1 = dynamics(s0, cmd, params);
  const Derivs k2 = dynamics(advance(s0, k1, dt / 2.0), cmd, params);
  const Derivs k3 = dynamics(advance(s0, k2, dt / 2.0), cmd, params);
  const Derivs k4 = dynamics(advance(s0, k3, dt), cmd, params);

  OdeState s1;
  s1.x = s0.x + dt / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
  s1.y = s0.y + dt / 6.0 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
  s1.psi = wrap_to_pi(s0.psi + dt / 6.0 * (k1.dpsi + 2 * k2.dpsi + 2 * k3.dpsi + k4.dpsi));
  s1.v_x = s0.v_x + dt / 6.0 * (k1.dvx + 2 * k2.dvx + 2 * k3.dvx + k4.dvx);
  s1.v_y = s0.v_y + dt / 6.0 * (k1.dvy + 2 * k2.dvy + 2 * k3.dvy + k4.dvy);
  s1.omega = s0.omega + dt / 6.0 * (k1.domega + 2 * k2.domega + 2 * k3.domega + k4.domega);
  s1.delta = std::clamp(s0.delta + dt / 6.0 * (k1.ddelta + 2 * k2.ddelta + 2 * k3.ddelta + k4.ddelta),
                        -params.delta_max, params.delta_max);

  CarState out;
  out.pose = {s1.x, s1.y, s1.psi};
  out.v_x = s1.v_x;
  out.v_y = s1.v_y;
  out.yaw_rate = s1.omega;
  out.delta = s1.delta;
  out.t = state.t + dt;

  if (accel_out) {
    // IMU specific force in the body frame, centripetal terms included.
    double ax, ay;
    dynamics(s1, cmd, params, &ax, &ay);
    accel_out->a_x = ax;
    accel_out->a_y = ay;
  }
  return out;
}

void footprint_corners(const track::Pose2D& pose, double length, double width, double xs[4],
                       double ys[4]) {
  const double c = std::cos(pose.psi), s = std::sin(pose.psi);
  const double hl = length / 2.0, hw = width / 2.0;
  const double lx[4] = {hl, hl, -hl, -hl};
  const double ly[4] = {hw, -hw, -hw, hw};
  for (int i = 0; i < 4; ++i) {
    xs[i] = pose.x + c * lx[i] - s * ly[i];
    ys[i] = pose.y + s * lx[i] + c * ly[i];
  }
}

bool rectangles_overlap(const track::Pose2D& a, double la, double wa, const track::Pose2D& b,
                        double lb, double wb) {
  double ax[4], ay[4], bx[4], by[4];
  footprint_corners(a, la, wa, ax, ay);
  footprint_corners(b, lb, wb, bx, by);

  auto separated_on = [](double nx, double ny, const double px[4], const double py[4],
                         const double qx[4], const double qy[4]) {
    double pmin = 1e300, pmax = -1e300, qmin = 1e300, qmax = -1e300;
    for (int i = 0; i < 4; ++i) {
      const double pp = nx * px[i] + ny * py[i];
      const double qq = nx * qx[i] + ny * qy[i];
      pmin = std::min(pmin, pp);
      pmax = std::max(pmax, pp);
      qmin = std::min(qmin, qq);
      qmax = std::max(qmax, qq);
    }
    return pmax < qmin || qmax < pmin;
  };

  const double axes[4][2] = {{std::cos(a.psi), std::sin(a.psi)},
                             {-std::sin(a.psi), std::cos(a.psi)},
                             {std::cos(b.psi), std::sin(b.psi)},
                             {-std::sin(b.psi), std::cos(b.psi)}};
  for (const auto& axis : axes)
    if (separated_on(axis[0], axis[1], ax, ay, bx, by)) return false;
  return true;
}

}  // namespace rs::sim
