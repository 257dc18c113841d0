#include "racestack/opponent/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rs::opponent {
namespace {

// Andrew monotone chain; returns hull points in counter-clockwise order.
std::vector<std::pair<double, double>> convex_hull(const PointCloud2D& cloud) {
  std::vector<std::pair<double, double>> pts(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) pts[i] = {cloud.x[i], cloud.y[i]};
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;

  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

std::vector<PointCloud2D> segment_scan(const sim::LaserScan& scan,
                                       const track::Pose2D& ego_pose,
                                       const DetectionParams& params) {
  std::vector<PointCloud2D> clusters;
  PointCloud2D current;
  double prev_r = -1.0;
  double max_r_in_cluster = 0.0;

  auto flush = [&] {
    if (!current.x.empty() && max_r_in_cluster <= params.max_viewing_distance)
      clusters.push_back(std::move(current));
    current = PointCloud2D{};
    max_r_in_cluster = 0.0;
  };

  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    if (r >= scan.range_max - 1e-9 || r <= 0.0) {  // no return
      flush();
      prev_r = -1.0;
      continue;
    }
    if (prev_r > 0.0) {
      // Adaptive breakpoint distance from the previous return.
      const double dphi = scan.increment;
      const double threshold =
          prev_r * std::sin(dphi) / std::sin(params.lambda - dphi) + 3.0 * params.sigma_r;
      const double a0 = scan.beam_angle(i - 1), a1 = scan.beam_angle(i);
      const double x0 = prev_r * std::cos(a0), y0 = prev_r * std::sin(a0);
      const double x1 = r * std::cos(a1), y1 = r * std::sin(a1);
      if (std::hypot(x1 - x0, y1 - y0) > threshold) flush();
    }
    const double beam = ego_pose.psi + scan.beam_angle(i);
    current.x.push_back(ego_pose.x + r * std::cos(beam));
    current.y.push_back(ego_pose.y + r * std::sin(beam));
    max_r_in_cluster = std::max(max_r_in_cluster, r);
    prev_r = r;
  }
  flush();
  return clusters;
}

std::vector<PointCloud2D> filter_clusters(const std::vector<PointCloud2D>& clusters,
                                          const track::FrenetFrame& frame,
                                          const DetectionParams& params) {
  std::vector<PointCloud2D> kept;
  for (const auto& cluster : clusters) {
    if (cluster.size() < params.min_obs_size) continue;

    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      cx += cluster.x[i];
      cy += cluster.y[i];
    }
    cx /= static_cast<double>(cluster.size());
    cy /= static_cast<double>(cluster.size());

    const auto fp = frame.cartesian_to_frenet(cx, cy);
    if (!fp) continue;
    const double left = frame.boundary_distance(fp->s, track::Side::kLeft);
    const double right = frame.boundary_distance(fp->s, track::Side::kRight);
    const bool inside = fp->d < left - params.boundary_inflation &&
                        fp->d > -(right - params.boundary_inflation);
    if (!inside) continue;

    // Cheap extent bound before the exact rectangle fit.
    double min_x = cluster.x[0], max_x = cluster.x[0], min_y = cluster.y[0],
           max_y = cluster.y[0];
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      min_x = std::min(min_x, cluster.x[i]);
      max_x = std::max(max_x, cluster.x[i]);
      min_y = std::min(min_y, cluster.y[i]);
      max_y = std::max(max_y, cluster.y[i]);
    }
    if (std::hypot(max_x - min_x, max_y - min_y) > 2.0 * params.max_obs_size) continue;
    kept.push_back(cluster);
  }
  return kept;
}

Obstacle fit_rectangle(const PointCloud2D& cluster, const track::FrenetFrame& frame,
                       double stamp) {
  Obstacle out;
  out.n_points = cluster.size();
  out.stamp = stamp;
  if (cluster.size() == 0) return out;

  const auto hull = convex_hull(cluster);
  if (hull.size() == 1) {
    out.x_center = hull[0].first;
    out.y_center = hull[0].second;
  } else if (hull.size() == 2) {
    // Degenerate: a segment; zero minor extent.
    out.x_center = (hull[0].first + hull[1].first) / 2.0;
    out.y_center = (hull[0].second + hull[1].second) / 2.0;
    out.size = std::hypot(hull[1].first - hull[0].first, hull[1].second - hull[0].second);
    out.size_minor = 0.0;
    out.yaw = std::atan2(hull[1].second - hull[0].second, hull[1].first - hull[0].first);
  } else {
    // Rotating calipers: the minimal-area box has a side collinear with a
    // hull edge.
    double best_area = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < hull.size(); ++e) {
      const auto& a = hull[e];
      const auto& b = hull[(e + 1) % hull.size()];
      const double angle = std::atan2(b.second - a.second, b.first - a.first);
      const double c = std::cos(angle), s = std::sin(angle);
      double min_u = 1e300, max_u = -1e300, min_v = 1e300, max_v = -1e300;
      for (const auto& p : hull) {
        const double u = c * p.first + s * p.second;
        const double v = -s * p.first + c * p.second;
        min_u = std::min(min_u, u);
        max_u = std::max(max_u, u);
        min_v = std::min(min_v, v);
        max_v = std::max(max_v, v);
      }
      const double area = (max_u - min_u) * (max_v - min_v);
      if (area < best_area) {
        best_area = area;
        const double cu = (min_u + max_u) / 2.0, cv = (min_v + max_v) / 2.0;
        out.x_center = c * cu - s * cv;
        out.y_center = s * cu + c * cv;
        const double du = max_u - min_u, dv = max_v - min_v;
        out.size = std::max(du, dv);
        out.size_minor = std::min(du, dv);
        out.yaw = du >= dv ? angle : wrap_to_pi(angle + kPi / 2.0);
      }
    }
  }

  // Rectangle orientation is defined modulo pi; normalize into (-pi/2, pi/2].
  out.yaw = wrap_to_pi(out.yaw);
  if (out.yaw > kPi / 2.0) out.yaw -= kPi;
  if (out.yaw <= -kPi / 2.0) out.yaw += kPi;

  if (const auto fp = frame.cartesian_to_frenet(out.x_center, out.y_center, /*force=*/true)) {
    out.s_center = fp->s;
    out.d_center = fp->d;
  }
  return out;
}

std::vector<Obstacle> detect(const sim::LaserScan& scan, const track::Pose2D& ego_pose,
                             const track::FrenetFrame& frame, const DetectionParams& params) {
  // Boundary returns are masked per point before clustering (the Frenet d
  // threshold), so an obstacle hugging a wall still segments cleanly instead
  // of merging with the wall and failing the size filter.
  sim::LaserScan masked = scan;
  for (std::size_t i = 0; i < masked.ranges.size(); ++i) {
    const double r = masked.ranges[i];
    if (r >= scan.range_max - 1e-9 || r <= 0.0) continue;
    const double beam = ego_pose.psi + scan.beam_angle(i);
    const double px = ego_pose.x + r * std::cos(beam);
    const double py = ego_pose.y + r * std::sin(beam);
    const auto fp = frame.cartesian_to_frenet(px, py, /*force=*/true);
    const double left = frame.boundary_distance(fp->s, track::Side::kLeft);
    const double right = frame.boundary_distance(fp->s, track::Side::kRight);
    if (fp->d >= left - params.boundary_inflation || fp->d <= -(right - params.boundary_inflation))
      masked.ranges[i] = scan.range_max;
  }

  const auto clusters = filter_clusters(segment_scan(masked, ego_pose, params), frame, params);
  std::vector<Obstacle> out;
  for (const auto& cluster : clusters) {
    Obstacle obs = fit_rectangle(cluster, frame, scan.stamp);
    if (obs.size > params.max_obs_size) continue;

    if (params.expected_length > 0.0) {
      // Push the center away from the sensor by half the unseen body depth.
      const double ray = std::atan2(obs.y_center - ego_pose.y, obs.x_center - ego_pose.x);
      const double tangent = frame.heading_at(obs.s_center);
      const double cos_phi = std::abs(std::cos(ray - tangent));
      const double sin_phi = std::abs(std::sin(ray - tangent));
      const double expected_depth =
          cos_phi * params.expected_length + sin_phi * params.expected_width;
      // Observed extent of the fit along the viewing ray.
      const double cos_a = std::abs(std::cos(ray - obs.yaw));
      const double sin_a = std::abs(std::sin(ray - obs.yaw));
      const double seen_depth = cos_a * obs.size + sin_a * obs.size_minor;
      const double push = std::clamp((expected_depth - seen_depth) / 2.0, 0.0,
                                     params.expected_length / 2.0);
      obs.x_center += push * std::cos(ray);
      obs.y_center += push * std::sin(ray);
      if (const auto fp = frame.cartesian_to_frenet(obs.x_center, obs.y_center, true)) {
        obs.s_center = fp->s;
        obs.d_center = fp->d;
      }
    }
    out.push_back(obs);
  }
  return out;
}

}  // namespace rs::opponent
