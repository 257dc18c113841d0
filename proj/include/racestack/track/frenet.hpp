#pragma once
#include <optional>
#include <vector>

#include "racestack/track/types.hpp"

namespace rs::track {

enum class Side { kLeft, kRight };

// Bidirectional Cartesian <-> Frenet conversion against a fixed raceline.
// Nearest-waypoint queries run on a uniform spatial hash (cell size 4*step);
// equidistant candidates resolve to the lower waypoint index. Immutable after
// construction, safe to share across threads.
class FrenetFrame {
 public:
  explicit FrenetFrame(Raceline line, double corridor_halfwidth = 5.0);

  const Raceline& line() const { return line_; }
  double s_max() const { return line_.s_max; }
  double corridor() const { return corridor_; }

  // Returns the position part of the Frenet pose, or nullopt when the point
  // lies farther than the corridor band from the line (unless force is set).
  std::optional<FrenetPose> cartesian_to_frenet(double x, double y,
                                                bool force = false) const;

  // Converts a full pose: position plus body velocity rotated into (v_s, v_d)
  // through the heading-vs-raceline angle.
  std::optional<FrenetPose> pose_to_frenet(const Pose2D& pose, double v_x, double v_y,
                                           bool force = false) const;

  void frenet_to_cartesian(double s, double d, double& x, double& y) const;
  Pose2D frenet_to_pose(double s, double d) const;

  // Linear interpolation of per-point boundary distance at wrapped s.
  double boundary_distance(double s, Side side) const;

  // Linear (cyclic) interpolation of the velocity profile / curvature at s.
  double velocity_at(double s) const;
  double curvature_at(double s) const;
  double heading_at(double s) const;

  // Index of the waypoint nearest to (x, y); lower index wins ties.
  int nearest_waypoint(double x, double y) const;

 private:
  double interp_cyclic(const std::vector<double>& f, double s) const;

  Raceline line_;
  double corridor_ = 5.0;

  // Spatial hash over waypoints.
  double cell_ = 0.4;
  double min_x_ = 0.0, min_y_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> bins_;

  int bin_index(int bx, int by) const { return by * nx_ + bx; }
};

}  // namespace rs::track
