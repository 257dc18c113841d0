#pragma once
#include <Eigen/Dense>

#include <vector>

#include "racestack/sim/sensors.hpp"

namespace rs::estimation {

// State layout of the omnidirectional 3D point-mass motion model.
enum StateIndex : int {
  kX = 0, kY, kZ, kRoll, kPitch, kYaw,
  kVx, kVy, kVz, kVroll, kVpitch, kVyaw,
  kAx, kAy, kAz,
  kStateDim
};

// Per-source fusion selection: 5x3 boolean matrix over
// [x y z; roll pitch yaw; vx vy vz; vroll vpitch vyaw; ax ay az].
struct SourceConfig {
  bool sel[5][3] = {};
  double var[5][3] = {};  // measurement variances; zeros are floored at 1e-6
};

struct FusionConfig {
  SourceConfig odom;  // wheel odometry twist
  SourceConfig imu;   // orientation + angular rate

  // Reference tuning: odometry fuses vx/vy, IMU fuses yaw and yaw rate,
  // linear accelerations are not considered.
  static FusionConfig defaults() {
    FusionConfig cfg;
    cfg.odom.sel[2][0] = true;  // vx
    cfg.odom.sel[2][1] = true;  // vy
    cfg.odom.var[0][0] = 0.25;
    cfg.odom.var[0][1] = 0.5;
    cfg.odom.var[1][2] = 0.4;
    cfg.odom.var[2][0] = 0.02;
    cfg.odom.var[2][1] = 0.05;
    cfg.odom.var[2][2] = 0.0;
    cfg.imu.sel[1][2] = true;   // yaw
    cfg.imu.sel[3][2] = true;   // yaw rate
    return cfg;
  }

  bool any_velocity_source() const {
    for (int c = 0; c < 3; ++c)
      if (odom.sel[2][c] || imu.sel[2][c]) return true;
    return false;
  }
};

// Velocity-estimation EKF over the 15-dim point-mass state. With
// two_d_mode the out-of-plane states stay pinned near zero with 1e-6
// covariance. Covariance health is restored by re-symmetrizing and
// clamping eigenvalues at 1e-12 whenever an update turns it indefinite.
class OdomEkf {
 public:
  using Vec = Eigen::Matrix<double, kStateDim, 1>;
  using Mat = Eigen::Matrix<double, kStateDim, kStateDim>;

  explicit OdomEkf(const FusionConfig& cfg = FusionConfig::defaults(), bool two_d_mode = true);

  void predict(double dt);

  // Measurement update for one source reading; rows disabled in the fusion
  // config are ignored. Stale timestamps are dropped (returns false).
  bool update_imu(const sim::ImuSample& imu);
  bool update_wheel_odom(const sim::WheelOdomSample& odom);

  const Vec& state() const { return x_; }
  const Mat& covariance() const { return p_; }
  double yaw() const { return x_(kYaw); }
  double v_x() const { return x_(kVx); }
  double v_y() const { return x_(kVy); }
  double yaw_rate() const { return x_(kVyaw); }
  double last_stamp() const { return last_stamp_; }
  int psd_repairs() const { return psd_repairs_; }
  int dropped_stale() const { return dropped_stale_; }

  void set_process_noise(const Vec& diag) { q_diag_ = diag; }

  // Transfer function of the motion model (exposed for tests).
  static Vec transfer(const Vec& x, double dt);

 private:
  struct ScalarMeasurement {
    int index;
    double value;
    double variance;
    bool angular;
  };
  bool apply(const std::vector<ScalarMeasurement>& ms, double stamp);
  void enforce_two_d();
  void ensure_psd();

  FusionConfig cfg_;
  bool two_d_mode_ = true;
  std::vector<int> pinned_;
  Vec x_ = Vec::Zero();
  Mat p_;
  Vec q_diag_;
  double last_stamp_ = 0.0;
  int psd_repairs_ = 0;
  int dropped_stale_ = 0;
};

}  // namespace rs::estimation
