#pragma once
#include <vector>

#include "racestack/common/rng.hpp"
#include "racestack/sim/vehicle.hpp"
#include "racestack/track/types.hpp"

namespace rs::sim {

// 270-degree planar scan, ranges capped at 10 m. A beam that hits nothing
// reports exactly range_max.
struct LaserScan {
  double angle_min = -3.0 * kPi / 4.0;
  double angle_max = 3.0 * kPi / 4.0;
  double increment = (3.0 * kPi / 2.0) / 1080.0;
  double range_max = 10.0;
  std::vector<double> ranges;
  double stamp = 0.0;
  bool degenerate = false;  // sensor pose inside an occupied cell

  std::size_t beam_count() const {
    return static_cast<std::size_t>(std::llround((angle_max - angle_min) / increment)) + 1;
  }
  double beam_angle(std::size_t i) const { return angle_min + static_cast<double>(i) * increment; }
};

struct LidarConfig {
  std::size_t beams = 1081;
  double range_max = 10.0;
  double sigma_range = 0.01;  // m, Gaussian range noise (0 disables)
};

struct Footprint {
  track::Pose2D pose;
  double length = 0.50;
  double width = 0.30;
};

// Single ray against the grid (DDA over occupied cells), unobstructed
// distance capped at max_range. Unknown cells do not block.
double cast_ray(const track::OccupancyGrid& grid, double ox, double oy, double angle,
                double max_range);

// Ray against an oriented rectangle; returns hit distance or max_range.
double ray_rectangle(double ox, double oy, double angle, const Footprint& box,
                     double max_range);

// Full sweep from `pose` against grid occupancy plus other-car footprints.
LaserScan simulate_lidar(const track::OccupancyGrid& grid, const std::vector<Footprint>& others,
                         const track::Pose2D& pose, const LidarConfig& cfg, Rng& rng,
                         double stamp = 0.0);

}  // namespace rs::sim
