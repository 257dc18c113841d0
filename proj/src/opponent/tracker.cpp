#include "racestack/opponent/tracker.hpp"

#include <cmath>
#include <limits>

#include "racestack/sim/lidar.hpp"

namespace rs::opponent {

bool line_of_sight(const track::Pose2D& ego_pose, double opp_x, double opp_y,
                   const track::OccupancyGrid& grid, double max_viewing_distance) {
  const double dist = std::hypot(opp_x - ego_pose.x, opp_y - ego_pose.y);
  if (dist > max_viewing_distance) return false;
  const double angle = std::atan2(opp_y - ego_pose.y, opp_x - ego_pose.x);
  const double clear = sim::cast_ray(grid, ego_pose.x, ego_pose.y, angle, dist);
  return clear >= dist - 1e-9;
}

OpponentTracker::OpponentTracker(const track::FrenetFrame& frame, const TrackerParams& params)
    : frame_(frame), params_(params) {
  q_ = Eigen::Matrix4d::Zero();
  q_(0, 0) = params_.q_s[0][0];
  q_(0, 1) = q_(1, 0) = params_.q_s[0][1];
  q_(1, 1) = params_.q_s[1][1];
  q_(2, 2) = params_.q_d[0][0];
  q_(2, 3) = q_(3, 2) = params_.q_d[0][1];
  q_(3, 3) = params_.q_d[1][1];
  reset();
}

Eigen::Matrix4d OpponentTracker::f_matrix(double dt) {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 1) = dt;
  f(2, 3) = dt;
  return f;
}

Eigen::Matrix<double, 4, 3> OpponentTracker::b_matrix(const TrackerParams& p) {
  Eigen::Matrix<double, 4, 3> b = Eigen::Matrix<double, 4, 3>::Zero();
  b(1, 0) = p.p_vs;
  b(2, 1) = p.p_d;
  b(3, 2) = p.p_vd;
  return b;
}

Eigen::Vector3d OpponentTracker::input_vector(bool in_los) const {
  Eigen::Vector3d u;
  if (in_los) {
    u << 0.0, -est_.x(2), -est_.x(3);
  } else {
    const double v_target =
        frame_.velocity_at(est_.x(0)) * params_.target_speed_ratio;
    u << v_target - est_.x(1), -est_.x(2), -est_.x(3);
  }
  return u;
}

void OpponentTracker::predict(double dt, bool in_los) {
  if (!est_.valid) return;
  const Eigen::Matrix4d f = f_matrix(dt);
  const Eigen::Vector3d u = input_vector(in_los);
  est_.x = f * est_.x + b_matrix(params_) * u;
  est_.x(0) = track::wrap_s(est_.x(0), frame_.s_max());
  est_.P = f * est_.P * f.transpose() + q_;
  est_.P = ((est_.P + est_.P.transpose()) / 2.0).eval();
  est_.in_los = in_los;
}

void OpponentTracker::update(const std::vector<Obstacle>& detections, double stamp) {
  const double s_max = frame_.s_max();

  // Gate on the position innovation; the nearest gated detection feeds the
  // filter, the rest accumulate as static obstacles.
  int best = -1;
  double best_m2 = std::numeric_limits<double>::infinity();
  if (est_.valid) {
    const Eigen::Matrix2d s_pos =
        (Eigen::Matrix2d() << est_.P(0, 0) + params_.r_diag[0], est_.P(0, 2),
         est_.P(2, 0), est_.P(2, 2) + params_.r_diag[2])
            .finished();
    const Eigen::Matrix2d s_inv = s_pos.inverse();
    for (std::size_t i = 0; i < detections.size(); ++i) {
      Eigen::Vector2d innov(track::cyclic_diff(detections[i].s_center, est_.x(0), s_max),
                            detections[i].d_center - est_.x(2));
      const double m2 = innov.dot(s_inv * innov);
      if (m2 < best_m2) {
        best_m2 = m2;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0 && best_m2 > params_.gate_sigma * params_.gate_sigma) best = -1;
  }

  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (static_cast<int>(i) == best && est_.valid) continue;
    // Merge into an existing static obstacle or create one.
    bool merged = false;
    for (auto& st : statics_) {
      if (std::abs(track::cyclic_diff(detections[i].s_center, st.s, s_max)) < 0.5 &&
          std::abs(detections[i].d_center - st.d) < 0.5) {
        const double w = static_cast<double>(st.observations);
        st.s = track::wrap_s(
            st.s + track::cyclic_diff(detections[i].s_center, st.s, s_max) / (w + 1.0), s_max);
        st.d = (st.d * w + detections[i].d_center) / (w + 1.0);
        ++st.observations;
        merged = true;
        break;
      }
    }
    if (!merged) statics_.push_back({detections[i].s_center, detections[i].d_center, 1});
  }

  if (!est_.valid) {
    // Seed the filter from the detection nearest to the ego (first one).
    if (!detections.empty()) {
      const auto& det = detections.front();
      est_.x << det.s_center, 0.0, det.d_center, 0.0;
      est_.P = Eigen::Matrix4d::Identity();
      est_.P(1, 1) = est_.P(3, 3) = 4.0;
      est_.valid = true;
      est_.updates = 1;
      meas_hist_.push_back({stamp, det.s_center, det.d_center});
      last_seen_stamp_ = stamp;
      est_.stamp = stamp;
    }
    return;
  }

  if (best < 0) {
    // Unseen: reset once the track has been lost long enough while it
    // should have been visible.
    if (est_.in_los && stamp - last_seen_stamp_ > params_.t_lost) reset();
    return;
  }

  const auto& det = detections[static_cast<std::size_t>(best)];
  last_seen_stamp_ = stamp;

  // Measurement: position always; velocity by finite difference over a
  // baseline long enough that the position noise does not dominate.
  Eigen::Vector4d z(det.s_center, 0.0, det.d_center, 0.0);
  bool have_velocity = false;
  while (meas_hist_.size() > 1 &&
         stamp - meas_hist_[1].stamp >= params_.vel_baseline)
    meas_hist_.pop_front();
  if (!meas_hist_.empty()) {
    const Meas& ref = meas_hist_.front();
    const double dt = stamp - ref.stamp;
    if (dt >= params_.vel_baseline && dt < 1.0) {
      z(1) = track::cyclic_diff(det.s_center, ref.s, s_max) / dt;
      z(3) = (det.d_center - ref.d) / dt;
      have_velocity = true;
    }
  }
  meas_hist_.push_back({stamp, det.s_center, det.d_center});
  ++est_.updates;

  // Standard KF update with identity observation; the s residual is
  // normalized onto (-s_max/2, s_max/2].
  Eigen::Vector4d innov;
  innov(0) = track::cyclic_diff(z(0), est_.x(0), s_max);
  innov(1) = have_velocity ? z(1) - est_.x(1) : 0.0;
  innov(2) = z(2) - est_.x(2);
  innov(3) = have_velocity ? z(3) - est_.x(3) : 0.0;

  Eigen::Vector4d r_diag;
  r_diag << params_.r_diag[0], params_.r_diag[1], params_.r_diag[2], params_.r_diag[3];
  if (!have_velocity) {
    r_diag(1) = r_diag(3) = 1e6;  // effectively skip velocity rows
  }
  const Eigen::Matrix4d s_mat = est_.P + r_diag.asDiagonal().toDenseMatrix();
  const Eigen::Matrix4d k = est_.P * s_mat.inverse();
  est_.x += k * innov;
  est_.x(0) = track::wrap_s(est_.x(0), s_max);
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k;
  est_.P = ikh * est_.P * ikh.transpose() +
           k * r_diag.asDiagonal().toDenseMatrix() * k.transpose();
  est_.P = ((est_.P + est_.P.transpose()) / 2.0).eval();
  est_.stamp = stamp;

  recent_sd_.push_back({det.s_center, det.d_center});
  while (recent_sd_.size() > params_.vote_window) recent_sd_.pop_front();
  classify(stamp);
}

void OpponentTracker::classify(double stamp) {
  (void)stamp;
  if (recent_sd_.size() < 3) return;
  const double s_max = frame_.s_max();

  // Positional standard deviation of the recent detections (s handled
  // cyclically around the first sample).
  double ref_s = recent_sd_.front().first;
  double mean_s = 0.0, mean_d = 0.0;
  for (const auto& [s, d] : recent_sd_) {
    mean_s += track::cyclic_diff(s, ref_s, s_max);
    mean_d += d;
  }
  mean_s /= static_cast<double>(recent_sd_.size());
  mean_d /= static_cast<double>(recent_sd_.size());
  double var = 0.0;
  for (const auto& [s, d] : recent_sd_) {
    const double ds = track::cyclic_diff(s, ref_s, s_max) - mean_s;
    const double dd = d - mean_d;
    var += ds * ds + dd * dd;
  }
  var /= static_cast<double>(recent_sd_.size());

  votes_.push_back(std::sqrt(var) < params_.sigma_static);
  while (votes_.size() > params_.vote_window) votes_.pop_front();
  std::size_t static_votes = 0;
  for (bool v : votes_)
    if (v) ++static_votes;
  est_.is_static = 2 * static_votes > votes_.size();
}

void OpponentTracker::reset() {
  const bool was_valid = est_.valid;
  est_ = OpponentEstimate{};
  recent_sd_.clear();
  votes_.clear();
  meas_hist_.clear();
  if (was_valid) ++resets_;
}

}  // namespace rs::opponent
