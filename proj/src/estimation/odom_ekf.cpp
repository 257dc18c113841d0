#include "racestack/estimation/odom_ekf.hpp"

#include "racestack/common/angles.hpp"

namespace rs::estimation {

OdomEkf::OdomEkf(const FusionConfig& cfg, bool two_d_mode) : cfg_(cfg), two_d_mode_(two_d_mode) {
  if (!cfg_.any_velocity_source())
    throw std::invalid_argument("OdomEkf: at least one velocity source must be enabled");
  p_ = Mat::Identity() * 1e-2;  // diagonal prior for estimated states
  q_diag_ = Vec::Constant(0.02);
  q_diag_(kVx) = q_diag_(kVy) = 0.05;  // velocity random walk dominates
  q_diag_(kVyaw) = 0.05;
  q_diag_(kAx) = q_diag_(kAy) = q_diag_(kAz) = 5e-4;

  if (two_d_mode_) pinned_ = {kZ, kRoll, kPitch, kVz, kVroll, kVpitch, kAz};
  // Acceleration states no source observes are frozen at zero; left free
  // they absorb velocity transients and bias the estimate indefinitely.
  if (!cfg_.imu.sel[4][0] && !cfg_.odom.sel[4][0]) pinned_.push_back(kAx);
  if (!cfg_.imu.sel[4][1] && !cfg_.odom.sel[4][1]) pinned_.push_back(kAy);
  enforce_two_d();
}

OdomEkf::Vec OdomEkf::transfer(const Vec& x, double dt) {
  const double cr = std::cos(x(kRoll)), sr = std::sin(x(kRoll));
  const double cp = std::cos(x(kPitch)), sp = std::sin(x(kPitch));
  const double cy = std::cos(x(kYaw)), sy = std::sin(x(kYaw));

  // Body-to-world rotation applied to the body-frame velocity and
  // acceleration; angular rates map through the usual Euler kinematics.
  const double r00 = cy * cp, r01 = cy * sp * sr - sy * cr, r02 = cy * sp * cr + sy * sr;
  const double r10 = sy * cp, r11 = sy * sp * sr + cy * cr, r12 = sy * sp * cr - cy * sr;
  const double r20 = -sp, r21 = cp * sr, r22 = cp * cr;

  Vec out = x;
  const double dt2 = 0.5 * dt * dt;
  out(kX) += (r00 * x(kVx) + r01 * x(kVy) + r02 * x(kVz)) * dt +
             (r00 * x(kAx) + r01 * x(kAy) + r02 * x(kAz)) * dt2;
  out(kY) += (r10 * x(kVx) + r11 * x(kVy) + r12 * x(kVz)) * dt +
             (r10 * x(kAx) + r11 * x(kAy) + r12 * x(kAz)) * dt2;
  out(kZ) += (r20 * x(kVx) + r21 * x(kVy) + r22 * x(kVz)) * dt +
             (r20 * x(kAx) + r21 * x(kAy) + r22 * x(kAz)) * dt2;
  out(kRoll) = x(kRoll) + (x(kVroll) + x(kVpitch) * sr * std::tan(x(kPitch)) +
                           x(kVyaw) * cr * std::tan(x(kPitch))) * dt;
  out(kPitch) = x(kPitch) + (x(kVpitch) * cr - x(kVyaw) * sr) * dt;
  out(kYaw) = wrap_to_pi(x(kYaw) + (x(kVpitch) * sr / cp + x(kVyaw) * cr / cp) * dt);
  out(kVx) += x(kAx) * dt;
  out(kVy) += x(kAy) * dt;
  out(kVz) += x(kAz) * dt;
  return out;
}

void OdomEkf::predict(double dt) {
  if (!(dt > 0.0) || dt > 0.1)
    throw std::invalid_argument("OdomEkf::predict: dt must be in (0, 0.1 s]");

  const Vec x0 = x_;
  x_ = transfer(x0, dt);

  // Jacobian by central differences around the prior mean.
  Mat f;
  const double h = 1e-6;
  for (int j = 0; j < kStateDim; ++j) {
    Vec plus = x0, minus = x0;
    plus(j) += h;
    minus(j) -= h;
    const Vec fp = transfer(plus, dt);
    const Vec fm = transfer(minus, dt);
    for (int i = 0; i < kStateDim; ++i) {
      double diff = fp(i) - fm(i);
      if (i == kYaw || i == kRoll || i == kPitch) diff = wrap_to_pi(diff);
      f(i, j) = diff / (2.0 * h);
    }
  }

  p_ = f * p_ * f.transpose();
  p_.diagonal() += q_diag_ * dt;
  ensure_psd();
  enforce_two_d();
}

bool OdomEkf::apply(const std::vector<ScalarMeasurement>& ms, double stamp) {
  if (stamp < last_stamp_) {
    ++dropped_stale_;
    return false;
  }
  last_stamp_ = stamp;

  for (const auto& m : ms) {
    const Eigen::Matrix<double, 1, kStateDim> h =
        Eigen::Matrix<double, 1, kStateDim>::Unit(m.index);
    const double r = std::max(m.variance, 1e-6);
    const double innovation_raw = m.value - x_(m.index);
    const double innovation = m.angular ? wrap_to_pi(innovation_raw) : innovation_raw;
    const double s = p_(m.index, m.index) + r;
    const Vec k = p_.col(m.index) / s;
    x_ += k * innovation;
    x_(kYaw) = wrap_to_pi(x_(kYaw));
    // Joseph form keeps the update numerically symmetric.
    const Mat ikh = Mat::Identity() - k * h;
    p_ = ikh * p_ * ikh.transpose() + k * r * k.transpose();
  }
  ensure_psd();
  enforce_two_d();
  return true;
}

bool OdomEkf::update_imu(const sim::ImuSample& imu) {
  std::vector<ScalarMeasurement> ms;
  if (cfg_.imu.sel[1][2]) ms.push_back({kYaw, imu.yaw, cfg_.imu.var[1][2], true});
  if (cfg_.imu.sel[3][2]) ms.push_back({kVyaw, imu.yaw_rate, cfg_.imu.var[3][2], false});
  if (cfg_.imu.sel[4][0]) ms.push_back({kAx, imu.a_x, cfg_.imu.var[4][0], false});
  if (cfg_.imu.sel[4][1]) ms.push_back({kAy, imu.a_y, cfg_.imu.var[4][1], false});
  return apply(ms, imu.stamp);
}

bool OdomEkf::update_wheel_odom(const sim::WheelOdomSample& odom) {
  std::vector<ScalarMeasurement> ms;
  if (cfg_.odom.sel[2][0]) ms.push_back({kVx, odom.v_x, cfg_.odom.var[2][0], false});
  if (cfg_.odom.sel[2][1]) ms.push_back({kVy, odom.v_y, cfg_.odom.var[2][1], false});
  if (cfg_.odom.sel[3][2]) ms.push_back({kVyaw, odom.yaw_rate, cfg_.odom.var[3][2], false});
  return apply(ms, odom.stamp);
}

void OdomEkf::enforce_two_d() {
  for (int idx : pinned_) {
    x_(idx) = 0.0;
    p_.row(idx).setZero();
    p_.col(idx).setZero();
    p_(idx, idx) = 1e-6;
  }
}

void OdomEkf::ensure_psd() {
  p_ = ((p_ + p_.transpose()) / 2.0).eval();
  if (p_.diagonal().minCoeff() >= 0.0) return;
  Eigen::SelfAdjointEigenSolver<Mat> eig(p_);
  Vec vals = eig.eigenvalues().cwiseMax(1e-12);
  p_ = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  ++psd_repairs_;
}

}  // namespace rs::estimation
