#pragma once
#include <stdexcept>

#include "racestack/track/types.hpp"

namespace rs::sim {

// Lateral-force magic formula: F = D*sin(C*atan(B*a - E*(B*a - atan(B*a)))).
struct PacejkaTire {
  double B = 5.0;   // stiffness factor
  double C = 1.3;   // shape factor
  double D = 18.0;  // peak force, N
  double E = 0.5;   // curvature factor

  double force(double slip_angle) const {
    const double ba = B * slip_angle;
    const double u = ba - E * (ba - std::atan(ba));
    return D * std::sin(C * std::atan(u));
  }
};

struct SingleTrackParams {
  double m = 3.5;              // kg
  double l_f = 0.159;          // m, CG to front axle
  double l_r = 0.171;          // m, CG to rear axle
  double h_cg = 0.074;         // m
  double I_zz = 0.052;         // kg m^2
  PacejkaTire tire_front{5.0, 1.2, 17.0, 0.5};
  PacejkaTire tire_rear{7.5, 1.4, 19.5, 0.6};
  double mu_scale = 1.0;       // track friction multiplier, (0, 1.5]
  double v_steer_max = 3.2;    // rad/s
  double a_long_max = 6.0;     // m/s^2
  double delta_max = 0.40;     // rad
  double width = 0.30;         // m, footprint
  double length = 0.50;        // m, footprint
  double drive_gain = 5.0;     // 1/s, velocity-setpoint P loop
  double steer_tau = 0.05;     // s, steering servo first-order lag
  double v_blend = 0.5;        // m/s, kinematic blend threshold

  double wheelbase() const { return l_f + l_r; }

  bool valid() const {
    return m > 0 && l_f > 0 && l_r > 0 && I_zz > 0 && h_cg > 0 && mu_scale > 0 &&
           mu_scale <= 1.5 && v_steer_max > 0 && a_long_max > 0 && delta_max > 0;
  }
};

struct CarState {
  track::Pose2D pose;
  double v_x = 0.0;      // m/s, body frame
  double v_y = 0.0;      // m/s
  double yaw_rate = 0.0; // rad/s
  double delta = 0.0;    // rad, current steering
  double t = 0.0;        // s
};

struct DriveCommand {
  double v_des = 0.0;     // m/s
  double delta_des = 0.0; // rad
};

// Body accelerations of the last integration step, for IMU synthesis.
struct BodyAccel {
  double a_x = 0.0; // m/s^2, specific force along body x
  double a_y = 0.0;
};

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One RK4 step of the single-track model with Pacejka tires. Steering and
// velocity commands act through a rate-limited servo and an internal
// velocity P loop. Below v_blend the dynamics blend into a kinematic bicycle
// to avoid the slip-angle singularity.
CarState step_dynamics(const CarState& state, const DriveCommand& cmd, double dt,
                       const SingleTrackParams& params, BodyAccel* accel_out = nullptr);

// Axle slip angles at the given state (zero below the blend speed).
void slip_angles(const CarState& state, const SingleTrackParams& params, double& alpha_f,
                 double& alpha_r);

// Footprint corners (4) of a car pose in map frame.
void footprint_corners(const track::Pose2D& pose, double length, double width,
                       double xs[4], double ys[4]);

// Oriented-rectangle overlap via separating axes.
bool rectangles_overlap(const track::Pose2D& a, double la, double wa,
                        const track::Pose2D& b, double lb, double wb);

}  // namespace rs::sim
