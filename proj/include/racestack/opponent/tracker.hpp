#pragma once
#include <Eigen/Dense>

#include <deque>
#include <optional>
#include <vector>

#include "racestack/opponent/detection.hpp"
#include "racestack/track/frenet.hpp"
#include "racestack/track/types.hpp"

namespace rs::opponent {

struct TrackerParams {
  // Prediction input gains toward the raceline / target speed.
  double p_vs = 0.2;
  double p_d = 0.02;
  double p_vd = 0.2;
  double target_speed_ratio = 0.6;  // v_s,target = raceline speed * ratio

  // Process noise blocks for (s, v_s) and (d, v_d).
  double q_s[2][2] = {{1.95e-7, 1.56e-5}, {1.56e-5, 1.25e-3}};
  double q_d[2][2] = {{7.81e-7, 6.25e-5}, {6.25e-5, 5e-3}};
  // Measurement variances for [s, v_s, d, v_d].
  double r_diag[4] = {0.002, 0.2, 0.002, 0.2};

  double gate_sigma = 3.0;         // association gate on innovation
  double vel_baseline = 0.2;       // s, finite-difference span for velocity
  double t_lost = 2.0;             // s, reset when unseen in LoS this long
  std::size_t vote_window = 10;    // detections in the static/dynamic buffer
  double sigma_static = 0.1;       // m, positional stddev threshold
  double max_viewing_distance = 9.0;
};

struct OpponentEstimate {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();  // [s, v_s, d, v_d]
  Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
  bool in_los = false;
  bool is_static = false;
  bool valid = false;
  double stamp = 0.0;
  int updates = 0;  // associated measurements so far

  double s() const { return x(0); }
  double v_s() const { return x(1); }
  double d() const { return x(2); }
  double v_d() const { return x(3); }
};

struct StaticObstacle {
  double s = 0.0, d = 0.0;
  std::size_t observations = 0;
};

// True when no occupied cell lies on the segment from the ego sensor to the
// opponent position and the distance is within sensing range.
bool line_of_sight(const track::Pose2D& ego_pose, double opp_x, double opp_y,
                   const track::OccupancyGrid& grid, double max_viewing_distance);

// Single-opponent tracker: constant-velocity EKF in cyclic Frenet
// coordinates with a LoS-dependent prediction input, plus a vote buffer
// classifying the object as static or dynamic from recent positional
// scatter. Detections outside the association gate seed a static-obstacle
// list instead of the filter.
class OpponentTracker {
 public:
  OpponentTracker(const track::FrenetFrame& frame, const TrackerParams& params);

  // Advances the filter by dt using the LoS-appropriate input.
  void predict(double dt, bool in_los);

  // Associates the nearest gated detection; others feed the static list.
  void update(const std::vector<Obstacle>& detections, double stamp);

  const OpponentEstimate& estimate() const { return est_; }
  const std::vector<StaticObstacle>& static_obstacles() const { return statics_; }
  int resets() const { return resets_; }

  // Prediction matrices for the given dt (exposed for tests).
  static Eigen::Matrix4d f_matrix(double dt);
  Eigen::Vector3d input_vector(bool in_los) const;
  static Eigen::Matrix<double, 4, 3> b_matrix(const TrackerParams& p);

 private:
  void reset();
  void classify(double stamp);

  const track::FrenetFrame& frame_;
  TrackerParams params_;
  OpponentEstimate est_;
  Eigen::Matrix4d q_;
  std::deque<std::pair<double, double>> recent_sd_;  // associated (s, d)
  std::deque<bool> votes_;
  std::vector<StaticObstacle> statics_;
  struct Meas {
    double stamp, s, d;
  };
  std::deque<Meas> meas_hist_;  // for the velocity finite difference
  double last_seen_stamp_ = 0.0;
  int resets_ = 0;
};

}  // namespace rs::opponent
