#include "racestack/track/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rs::track {

Raceline make_circle_raceline(double radius, double step, double v, double halfwidth,
                              double cx, double cy) {
  const double circumference = 2.0 * kPi * radius;
  const std::size_t n = static_cast<std::size_t>(std::llround(circumference / step));
  const double actual_step = circumference / static_cast<double>(n);

  Raceline line;
  line.step = actual_step;
  line.s_max = circumference;
  line.closed = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = static_cast<double>(i) * actual_step / radius;
    line.s.push_back(static_cast<double>(i) * actual_step);
    line.x.push_back(cx + radius * std::cos(theta));
    line.y.push_back(cy + radius * std::sin(theta));
    line.psi.push_back(wrap_to_pi(theta + kPi / 2.0));
    line.kappa.push_back(1.0 / radius);
    line.v.push_back(v);
    line.d_left.push_back(halfwidth);
    line.d_right.push_back(halfwidth);
  }
  return line;
}

Raceline make_straight_raceline(double length, double step, double v, double halfwidth) {
  const std::size_t n = static_cast<std::size_t>(std::llround(length / step)) + 1;
  Raceline line;
  line.step = step;
  line.s_max = static_cast<double>(n) * step;
  line.closed = false;
  for (std::size_t i = 0; i < n; ++i) {
    line.s.push_back(static_cast<double>(i) * step);
    line.x.push_back(static_cast<double>(i) * step);
    line.y.push_back(0.0);
    line.psi.push_back(0.0);
    line.kappa.push_back(0.0);
    line.v.push_back(v);
    line.d_left.push_back(halfwidth);
    line.d_right.push_back(halfwidth);
  }
  return line;
}

void oval_centerline(double straight, double radius, double ds, std::vector<double>& xs,
                     std::vector<double>& ys) {
  xs.clear();
  ys.clear();
  const double half = straight / 2.0;
  const double total = 2.0 * straight + 2.0 * kPi * radius;
  const std::size_t n = static_cast<std::size_t>(std::ceil(total / ds));
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n);
    double x, y;
    if (s < straight) {  // bottom straight, heading +x
      x = -half + s;
      y = -radius;
    } else if (s < straight + kPi * radius) {  // right semicircle
      const double a = (s - straight) / radius;
      x = half + radius * std::sin(a);
      y = -radius * std::cos(a);
    } else if (s < 2.0 * straight + kPi * radius) {  // top straight, heading -x
      x = half - (s - straight - kPi * radius);
      y = radius;
    } else {  // left semicircle
      const double a = (s - 2.0 * straight - kPi * radius) / radius;
      x = -half - radius * std::sin(a);
      y = radius * std::cos(a);
    }
    xs.push_back(x);
    ys.push_back(y);
  }
}

Raceline make_oval_raceline(double straight, double radius, double step, double v,
                            double halfwidth) {
  std::vector<double> xs, ys;
  oval_centerline(straight, radius, step / 4.0, xs, ys);
  return raceline_from_polyline(xs, ys, step, v, halfwidth);
}

Raceline raceline_from_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                                double step, double v, double halfwidth) {
  if (xs.size() < 3 || xs.size() != ys.size())
    throw TrackError("raceline_from_polyline: need a closed polyline");

  // Cumulative arc length of the closed polyline.
  const std::size_t m = xs.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    cum[i + 1] = cum[i] + std::hypot(xs[j] - xs[i], ys[j] - ys[i]);
  }
  const double total = cum[m];
  const std::size_t n = static_cast<std::size_t>(std::llround(total / step));
  if (n < 8) throw TrackError("raceline_from_polyline: polyline too short for step");
  const double actual_step = total / static_cast<double>(n);

  Raceline line;
  line.step = actual_step;
  line.s_max = total;
  line.closed = true;
  line.s.resize(n);
  line.x.resize(n);
  line.y.resize(n);
  line.psi.resize(n);
  line.kappa.resize(n);
  line.v.assign(n, v);
  line.d_left.assign(n, halfwidth);
  line.d_right.assign(n, halfwidth);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = static_cast<double>(i) * actual_step;
    while (seg + 1 < m && cum[seg + 1] <= target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    const std::size_t j = (seg + 1) % m;
    line.s[i] = target;
    line.x[i] = xs[seg] + t * (xs[j] - xs[seg]);
    line.y[i] = ys[seg] + t * (ys[j] - ys[seg]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    line.psi[i] = std::atan2(line.y[next] - line.y[prev], line.x[next] - line.x[prev]);
    // Menger curvature through three consecutive points.
    const double ax = line.x[prev], ay = line.y[prev];
    const double bx = line.x[i], by = line.y[i];
    const double cx = line.x[next], cy = line.y[next];
    const double area2 = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    const double la = std::hypot(bx - ax, by - ay);
    const double lb = std::hypot(cx - bx, cy - by);
    const double lc = std::hypot(cx - ax, cy - ay);
    const double denom = la * lb * lc;
    line.kappa[i] = denom > 1e-12 ? 2.0 * area2 / denom : 0.0;
  }
  return line;
}

OccupancyGrid render_corridor_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                   double halfwidth, double resolution, double wall_thickness,
                                   double margin) {
  if (xs.empty() || xs.size() != ys.size())
    throw TrackError("render_corridor_grid: empty centerline");

  double min_x = xs[0], max_x = xs[0], min_y = ys[0], max_y = ys[0];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    min_x = std::min(min_x, xs[i]);
    max_x = std::max(max_x, xs[i]);
    min_y = std::min(min_y, ys[i]);
    max_y = std::max(max_y, ys[i]);
  }
  const double pad = halfwidth + wall_thickness + margin;

  OccupancyGrid grid;
  grid.resolution = resolution;
  grid.origin.x = min_x - pad;
  grid.origin.y = min_y - pad;
  grid.width = static_cast<int>(std::ceil((max_x - min_x + 2.0 * pad) / resolution));
  grid.height = static_cast<int>(std::ceil((max_y - min_y + 2.0 * pad) / resolution));
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, Cell::kUnknown);

  const std::size_t m = xs.size();
  auto dist_to_centerline = [&](double px, double py) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = (i + 1) % m;
      const double vx = xs[j] - xs[i], vy = ys[j] - ys[i];
      const double wx = px - xs[i], wy = py - ys[i];
      const double len2 = vx * vx + vy * vy;
      double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const double dx = wx - t * vx, dy = wy - t * vy;
      best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
  };

  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      double wx, wy;
      grid.grid_to_world(ix + 0.5, iy + 0.5, wx, wy);
      const double dist = dist_to_centerline(wx, wy);
      if (dist <= halfwidth)
        grid.set(ix, iy, Cell::kFree);
      else if (dist <= halfwidth + wall_thickness)
        grid.set(ix, iy, Cell::kOccupied);
    }
  }
  return grid;
}

}  // namespace rs::track
