#pragma once
#include <vector>

#include "racestack/sim/lidar.hpp"
#include "racestack/track/frenet.hpp"

namespace rs::opponent {

struct DetectionParams {
  std::size_t min_obs_size = 40;     // LiDAR points
  double max_obs_size = 0.5;         // m, longest rectangle side
  double max_viewing_distance = 9.0; // m
  double boundary_inflation = 0.1;   // m, track-dependent
  double lambda = deg2rad(10.0);     // breakpoint incidence-angle threshold
  double sigma_r = 0.01;             // m, range noise in the threshold

  // Expected opponent footprint for the partial-view center correction; a
  // LiDAR only returns the near faces, so the fitted center sits in front of
  // the body center by half the unseen depth.
  double expected_length = 0.5;      // m
  double expected_width = 0.3;       // m
};

struct PointCloud2D {
  std::vector<double> x, y;  // map frame
  std::size_t size() const { return x.size(); }
};

// Fitted oriented bounding box of a cluster.
struct Obstacle {
  double x_center = 0.0, y_center = 0.0;  // map frame
  double s_center = 0.0, d_center = 0.0;  // frenet frame
  double size = 0.0;                       // m, max rectangle side
  double size_minor = 0.0;                 // m, min rectangle side
  double yaw = 0.0;                        // rad
  std::size_t n_points = 0;
  double stamp = 0.0;
};

// Splits a sweep into clusters of consecutive returns, breaking where the
// gap exceeds the adaptive threshold d = r*sin(dphi)/sin(lambda - dphi) +
// 3*sigma_r. Max-range returns never join a cluster; clusters farther than
// max_viewing_distance from the sensor are dropped.
std::vector<PointCloud2D> segment_scan(const sim::LaserScan& scan,
                                       const track::Pose2D& ego_pose,
                                       const DetectionParams& params);

// Keeps clusters that are on the track interior (|d| within the inflated
// boundary), carry enough points, and fit within max_obs_size.
std::vector<PointCloud2D> filter_clusters(const std::vector<PointCloud2D>& clusters,
                                          const track::FrenetFrame& frame,
                                          const DetectionParams& params);

// Minimal-area oriented rectangle via rotating calipers over the hull.
Obstacle fit_rectangle(const PointCloud2D& cluster, const track::FrenetFrame& frame,
                       double stamp = 0.0);

// Full per-scan pipeline: segment -> filter -> fit.
std::vector<Obstacle> detect(const sim::LaserScan& scan, const track::Pose2D& ego_pose,
                             const track::FrenetFrame& frame, const DetectionParams& params);

}  // namespace rs::opponent
