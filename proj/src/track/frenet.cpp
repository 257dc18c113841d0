#include "racestack/track/frenet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rs::track {

FrenetFrame::FrenetFrame(Raceline line, double corridor_halfwidth)
    : line_(std::move(line)), corridor_(corridor_halfwidth) {
  if (!line_.valid()) throw TrackError("FrenetFrame: invalid raceline");
  if (corridor_ <= 0.0) throw TrackError("FrenetFrame: corridor must be positive");

  cell_ = 4.0 * line_.step;
  const auto [min_x, max_x] = std::minmax_element(line_.x.begin(), line_.x.end());
  const auto [min_y, max_y] = std::minmax_element(line_.y.begin(), line_.y.end());
  min_x_ = *min_x - cell_;
  min_y_ = *min_y - cell_;
  nx_ = static_cast<int>(std::ceil((*max_x - min_x_) / cell_)) + 2;
  ny_ = static_cast<int>(std::ceil((*max_y - min_y_) / cell_)) + 2;
  bins_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int i = 0; i < static_cast<int>(line_.size()); ++i) {
    const int bx = static_cast<int>((line_.x[i] - min_x_) / cell_);
    const int by = static_cast<int>((line_.y[i] - min_y_) / cell_);
    bins_[bin_index(bx, by)].push_back(i);
  }
}

int FrenetFrame::nearest_waypoint(double x, double y) const {
  const int bx = std::clamp(static_cast<int>((x - min_x_) / cell_), 0, nx_ - 1);
  const int by = std::clamp(static_cast<int>((y - min_y_) / cell_), 0, ny_ - 1);

  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();

  const int max_ring = std::max(nx_, ny_);
  for (int ring = 0; ring <= max_ring; ++ring) {
    // Once a candidate is found, rings whose nearest possible point is
    // farther than the current best cannot improve on it.
    if (best >= 0) {
      const double ring_min = (ring - 1) * cell_;
      if (ring_min > 0.0 && ring_min * ring_min > best_d2) break;
    }
    bool any_cell = false;
    for (int dy = -ring; dy <= ring; ++dy) {
      for (int dx = -ring; dx <= ring; ++dx) {
        if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;  // ring shell only
        const int cx = bx + dx, cy = by + dy;
        if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) continue;
        any_cell = true;
        for (int idx : bins_[bin_index(cx, cy)]) {
          const double ddx = x - line_.x[idx];
          const double ddy = y - line_.y[idx];
          const double d2 = ddx * ddx + ddy * ddy;
          if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
          }
        }
      }
    }
    if (!any_cell && best >= 0) break;
  }
  return best;
}

std::optional<FrenetPose> FrenetFrame::cartesian_to_frenet(double x, double y,
                                                           bool force) const {
  const int k = nearest_waypoint(x, y);
  const double dx = x - line_.x[k];
  const double dy = y - line_.y[k];
  const double c = std::cos(line_.psi[k]);
  const double sn = std::sin(line_.psi[k]);

  FrenetPose out;
  out.s = wrap_s(line_.s[k] + dx * c + dy * sn, line_.s_max);
  out.d = -dx * sn + dy * c;
  if (!force && std::abs(out.d) > corridor_) return std::nullopt;
  return out;
}

std::optional<FrenetPose> FrenetFrame::pose_to_frenet(const Pose2D& pose, double v_x,
                                                      double v_y, bool force) const {
  auto fp = cartesian_to_frenet(pose.x, pose.y, force);
  if (!fp) return std::nullopt;
  const double dpsi = angle_diff(pose.psi, heading_at(fp->s));
  fp->v_s = v_x * std::cos(dpsi) - v_y * std::sin(dpsi);
  fp->v_d = v_x * std::sin(dpsi) + v_y * std::cos(dpsi);
  return fp;
}

void FrenetFrame::frenet_to_cartesian(double s, double d, double& x, double& y) const {
  const double sw = wrap_s(s, line_.s_max);
  const std::size_t n = line_.size();
  int k = static_cast<int>(std::llround(sw / line_.step)) % static_cast<int>(n);
  double ds = sw - line_.s[k];
  if (ds > 0.5 * line_.s_max) ds -= line_.s_max;
  if (ds < -0.5 * line_.s_max) ds += line_.s_max;
  const double c = std::cos(line_.psi[k]);
  const double sn = std::sin(line_.psi[k]);
  x = line_.x[k] + ds * c - d * sn;
  y = line_.y[k] + ds * sn + d * c;
}

Pose2D FrenetFrame::frenet_to_pose(double s, double d) const {
  Pose2D p;
  frenet_to_cartesian(s, d, p.x, p.y);
  p.psi = heading_at(s);
  return p;
}

double FrenetFrame::interp_cyclic(const std::vector<double>& f, double s) const {
  const double sw = wrap_s(s, line_.s_max);
  const std::size_t n = line_.size();
  const double u = sw / line_.step;
  std::size_t i0 = static_cast<std::size_t>(u) % n;
  const std::size_t i1 = (i0 + 1) % n;
  const double t = u - std::floor(u);
  return f[i0] + t * (f[i1] - f[i0]);
}

double FrenetFrame::boundary_distance(double s, Side side) const {
  return interp_cyclic(side == Side::kLeft ? line_.d_left : line_.d_right, s);
}

double FrenetFrame::velocity_at(double s) const { return interp_cyclic(line_.v, s); }

double FrenetFrame::curvature_at(double s) const { return interp_cyclic(line_.kappa, s); }

double FrenetFrame::heading_at(double s) const {
  const double sw = wrap_s(s, line_.s_max);
  const std::size_t n = line_.size();
  const double u = sw / line_.step;
  const std::size_t i0 = static_cast<std::size_t>(u) % n;
  const std::size_t i1 = (i0 + 1) % n;
  const double t = u - std::floor(u);
  return wrap_to_pi(line_.psi[i0] + t * angle_diff(line_.psi[i1], line_.psi[i0]));
}

}  // namespace rs::track
