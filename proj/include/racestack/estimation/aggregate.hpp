#pragma once
#include <optional>

#include "racestack/common/rng.hpp"
#include "racestack/track/frenet.hpp"

namespace rs::estimation {

// Final fused car state: localization pose, odometry-filter velocities, and
// the Frenet view of both.
struct CarStateEstimate {
  track::Pose2D pose;
  double v_x = 0.0;
  double v_y = 0.0;
  double yaw_rate = 0.0;
  track::FrenetPose frenet;
  bool stale = false;  // feeds the state machine's out-of-control condition
  double stamp = 0.0;
};

struct AggregatorConfig {
  double max_source_age = 0.1;  // s, freshness window for both sources
};

// Merges the localization pose stream with the velocity stream. When either
// source is older than the freshness window the last output is held and
// flagged stale.
class StateAggregator {
 public:
  StateAggregator(const track::FrenetFrame& frame, const AggregatorConfig& cfg = {})
      : frame_(frame), cfg_(cfg) {}

  void push_pose(const track::Pose2D& pose, double stamp) {
    pose_ = pose;
    pose_stamp_ = stamp;
  }

  void push_velocity(double v_x, double v_y, double yaw_rate, double stamp) {
    v_x_ = v_x;
    v_y_ = v_y;
    yaw_rate_ = yaw_rate;
    vel_stamp_ = stamp;
  }

  CarStateEstimate aggregate(double now);

 private:
  const track::FrenetFrame& frame_;
  AggregatorConfig cfg_;
  track::Pose2D pose_;
  double v_x_ = 0.0, v_y_ = 0.0, yaw_rate_ = 0.0;
  double pose_stamp_ = -1e9;
  double vel_stamp_ = -1e9;
  CarStateEstimate last_;
  bool have_output_ = false;
};

// Stand-in for the pose-graph localization path: ground truth plus white
// noise. Lets the harness A/B the aggregation without a second full
// localizer.
class NoisyPoseStub {
 public:
  NoisyPoseStub(double sigma_xy, double sigma_psi, std::uint64_t seed)
      : sigma_xy_(sigma_xy), sigma_psi_(sigma_psi), rng_(seed) {}

  track::Pose2D sample(const track::Pose2D& truth) {
    track::Pose2D out = truth;
    out.x += rng_.gaussian(0.0, sigma_xy_);
    out.y += rng_.gaussian(0.0, sigma_xy_);
    out.psi = wrap_to_pi(out.psi + rng_.gaussian(0.0, sigma_psi_));
    return out;
  }

 private:
  double sigma_xy_;
  double sigma_psi_;
  Rng rng_;
};

}  // namespace rs::estimation
