#include "racestack/sim/lidar.hpp"

#include <algorithm>
#include <cmath>

namespace rs::sim {

double cast_ray(const track::OccupancyGrid& grid, double ox, double oy, double angle,
                double max_range) {
  // Amanatides-Woo traversal in grid coordinates. The grid origin may be
  // rotated, so the ray direction is rotated into the grid frame as well.
  double gx, gy;
  grid.world_to_grid(ox, oy, gx, gy);
  const double dir_world = angle - grid.origin.psi;
  const double dx = std::cos(dir_world);
  const double dy = std::sin(dir_world);

  int ix = static_cast<int>(std::floor(gx));
  int iy = static_cast<int>(std::floor(gy));
  if (grid.occupied(ix, iy)) return 0.0;

  const double max_cells = max_range / grid.resolution;
  const int step_x = dx > 0.0 ? 1 : -1;
  const int step_y = dy > 0.0 ? 1 : -1;
  const double inv_dx = dx != 0.0 ? 1.0 / dx : 1e300;
  const double inv_dy = dy != 0.0 ? 1.0 / dy : 1e300;
  double t_max_x = dx != 0.0 ? ((dx > 0.0 ? (ix + 1 - gx) : (gx - ix)) * std::abs(inv_dx)) : 1e300;
  double t_max_y = dy != 0.0 ? ((dy > 0.0 ? (iy + 1 - gy) : (gy - iy)) * std::abs(inv_dy)) : 1e300;
  const double t_delta_x = std::abs(inv_dx);
  const double t_delta_y = std::abs(inv_dy);

  double t = 0.0;
  while (t <= max_cells) {
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += t_delta_x;
      ix += step_x;
    } else {
      t = t_max_y;
      t_max_y += t_delta_y;
      iy += step_y;
    }
    if (t > max_cells) break;
    if (grid.occupied(ix, iy)) return std::min(t * grid.resolution, max_range);
  }
  return max_range;
}

double ray_rectangle(double ox, double oy, double angle, const Footprint& box,
                     double max_range) {
  // Slab test in the rectangle's own frame.
  const double c = std::cos(box.pose.psi), s = std::sin(box.pose.psi);
  const double rx = ox - box.pose.x, ry = oy - box.pose.y;
  const double lx = c * rx + s * ry;
  const double ly = -s * rx + c * ry;
  const double wdx = std::cos(angle), wdy = std::sin(angle);
  const double ldx = c * wdx + s * wdy;
  const double ldy = -s * wdx + c * wdy;

  const double hx = box.length / 2.0, hy = box.width / 2.0;
  double t0 = 0.0, t1 = max_range;
  const double o[2] = {lx, ly}, d[2] = {ldx, ldy}, h[2] = {hx, hy};
  for (int axis = 0; axis < 2; ++axis) {
    if (std::abs(d[axis]) < 1e-12) {
      if (std::abs(o[axis]) > h[axis]) return max_range;
      continue;
    }
    double ta = (-h[axis] - o[axis]) / d[axis];
    double tb = (h[axis] - o[axis]) / d[axis];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return max_range;
  }
  return t0 > 0.0 && t0 <= max_range ? t0 : max_range;
}

LaserScan simulate_lidar(const track::OccupancyGrid& grid, const std::vector<Footprint>& others,
                         const track::Pose2D& pose, const LidarConfig& cfg, Rng& rng,
                         double stamp) {
  LaserScan scan;
  scan.range_max = cfg.range_max;
  scan.increment = (scan.angle_max - scan.angle_min) / static_cast<double>(cfg.beams - 1);
  scan.ranges.assign(cfg.beams, cfg.range_max);
  scan.stamp = stamp;

  if (grid.occupied_at_world(pose.x, pose.y)) {
    scan.degenerate = true;
    std::fill(scan.ranges.begin(), scan.ranges.end(), 0.0);
    return scan;
  }

  for (std::size_t i = 0; i < cfg.beams; ++i) {
    const double angle = pose.psi + scan.beam_angle(i);
    double r = cast_ray(grid, pose.x, pose.y, angle, cfg.range_max);
    for (const auto& box : others)
      r = std::min(r, ray_rectangle(pose.x, pose.y, angle, box, cfg.range_max));
    if (r < cfg.range_max && cfg.sigma_range > 0.0)
      r = std::clamp(r + rng.gaussian(0.0, cfg.sigma_range), 1e-3, cfg.range_max);
    scan.ranges[i] = r;
  }
  return scan;
}

}  // namespace rs::sim
