#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "racestack/common/angles.hpp"

namespace rs::track {

struct Pose2D {
  double x = 0.0;   // m, map frame
  double y = 0.0;   // m
  double psi = 0.0; // rad, wrapped to (-pi, pi]
};

// Position/velocity in curvilinear coordinates along the raceline.
// d is positive to the left of the line, s is wrapped to [0, s_max).
struct FrenetPose {
  double s = 0.0;
  double d = 0.0;
  double v_s = 0.0;
  double v_d = 0.0;
};

enum class Cell : std::uint8_t { kFree = 0, kOccupied = 1, kUnknown = 2 };

struct OccupancyGrid {
  double resolution = 0.05; // m per cell
  Pose2D origin;            // pose of the lower-left corner of cell (0,0)
  int width = 0;            // cells
  int height = 0;
  std::vector<Cell> cells;  // row-major, index = iy * width + ix

  bool valid() const {
    return resolution > 0.0 && width > 0 && height > 0 &&
           cells.size() == static_cast<std::size_t>(width) * height;
  }

  Cell at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= width || iy >= height) return Cell::kUnknown;
    return cells[static_cast<std::size_t>(iy) * width + ix];
  }

  void set(int ix, int iy, Cell c) {
    cells[static_cast<std::size_t>(iy) * width + ix] = c;
  }

  bool occupied(int ix, int iy) const { return at(ix, iy) == Cell::kOccupied; }

  // Map frame -> continuous grid coordinates (cell units, corner-anchored).
  void world_to_grid(double wx, double wy, double& gx, double& gy) const {
    const double c = std::cos(origin.psi), s = std::sin(origin.psi);
    const double dx = wx - origin.x, dy = wy - origin.y;
    gx = (c * dx + s * dy) / resolution;
    gy = (-s * dx + c * dy) / resolution;
  }

  void grid_to_world(double gx, double gy, double& wx, double& wy) const {
    const double c = std::cos(origin.psi), s = std::sin(origin.psi);
    const double lx = gx * resolution, ly = gy * resolution;
    wx = origin.x + c * lx - s * ly;
    wy = origin.y + s * lx + c * ly;
  }

  bool occupied_at_world(double wx, double wy) const {
    double gx, gy;
    world_to_grid(wx, wy, gx, gy);
    const int ix = static_cast<int>(std::floor(gx));
    const int iy = static_cast<int>(std::floor(gy));
    return occupied(ix, iy);
  }

  Cell cell_at_world(double wx, double wy) const {
    double gx, gy;
    world_to_grid(wx, wy, gx, gy);
    return at(static_cast<int>(std::floor(gx)), static_cast<int>(std::floor(gy)));
  }
};

// Closed, uniformly discretized reference trajectory. All arrays share the
// same length; s is strictly increasing from 0 with uniform spacing `step`,
// and s_max == n * step for closed lines (the seam segment closes the loop).
struct Raceline {
  double step = 0.1;
  std::vector<double> x, y, psi, kappa, s, v, d_left, d_right;
  double s_max = 0.0;
  bool closed = true;

  std::size_t size() const { return s.size(); }

  bool valid() const {
    const std::size_t n = s.size();
    if (n < 2 || step <= 0.0 || s_max <= 0.0) return false;
    if (x.size() != n || y.size() != n || psi.size() != n || kappa.size() != n ||
        v.size() != n || d_left.size() != n || d_right.size() != n)
      return false;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(s[i] - static_cast<double>(i) * step) > 1e-9) return false;
      if (d_left[i] < 0.0 || d_right[i] < 0.0 || v[i] < 0.0) return false;
    }
    if (closed && std::abs(s_max - static_cast<double>(n) * step) > 1e-9) return false;
    return true;
  }
};

struct TrackError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wraps an arc-length coordinate into [0, s_max).
inline double wrap_s(double s, double s_max) {
  if (s_max <= 0.0) throw TrackError("wrap_s: s_max must be positive");
  double r = std::fmod(s, s_max);
  if (r < 0.0) r += s_max;
  if (r >= s_max) r = 0.0;  // fmod can return s_max through rounding
  return r;
}

// Signed cyclic difference a - b normalized onto (-s_max/2, s_max/2].
inline double cyclic_diff(double a, double b, double s_max) {
  double d = std::fmod(a - b, s_max);
  if (d > 0.5 * s_max) d -= s_max;
  if (d <= -0.5 * s_max) d += s_max;
  return d;
}

}  // namespace rs::track
