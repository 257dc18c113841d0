#include "racestack/behavior/spliner.hpp"

#include <algorithm>
#include <cmath>

namespace rs::behavior {
namespace {

// Natural cubic spline through (xs, ys), evaluated at x (clamped to the
// knot range).
class NaturalCubic {
 public:
  NaturalCubic(const std::vector<double>& xs, const std::vector<double>& ys) : xs_(xs), ys_(ys) {
    const std::size_t n = xs.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = xs[i] - xs[i - 1];
      const double h1 = xs[i + 1] - xs[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      r[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
    }
    // Thomas solve on the interior; natural ends keep m[0] = m[n-1] = 0.
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (r[i] - c[i] * (i + 2 < n ? m_[i + 1] : 0.0)) / b[i];
      if (i == 1) break;
    }
  }

  double eval(double x) const {
    const std::size_t n = xs_.size();
    if (n < 2) return ys_.empty() ? 0.0 : ys_[0];
    const double xc = std::clamp(x, xs_.front(), xs_.back());
    std::size_t i = 1;
    while (i + 1 < n && xs_[i] < xc) ++i;
    const double h = xs_[i] - xs_[i - 1];
    const double t0 = (xs_[i] - xc) / h;
    const double t1 = (xc - xs_[i - 1]) / h;
    return t0 * ys_[i - 1] + t1 * ys_[i] +
           ((t0 * t0 * t0 - t0) * m_[i - 1] + (t1 * t1 * t1 - t1) * m_[i]) * h * h / 6.0;
  }

 private:
  std::vector<double> xs_, ys_;
  std::vector<double> m_;  // second derivatives at knots
};

}  // namespace

double velocity_scaler(double v_s_ego, double v_max) {
  return 1.0 + std::min(std::max(v_s_ego, 0.0) / v_max, 0.5);
}

double apex_offset(double d_opp, int side, const SplinerParams& p) {
  const double clearance = 0.5 * (p.w_opp + p.w_ego) + p.delta_apex;
  return side > 0 ? d_opp + clearance : d_opp - clearance;
}

LocalTrajectory global_as_trajectory(const track::FrenetFrame& frame) {
  const auto& line = frame.line();
  LocalTrajectory out;
  out.valid = true;
  out.is_spline = false;
  out.s = line.s;
  out.d.assign(line.size(), 0.0);
  out.x = line.x;
  out.y = line.y;
  out.v = line.v;
  return out;
}

LocalTrajectory plan_overtake(const opponent::OpponentEstimate& opp,
                              const track::FrenetPose& ego, const track::FrenetFrame& frame,
                              const SplinerParams& params) {
  LocalTrajectory out;
  const double s_max = frame.s_max();

  // Opponent behind the ego: nothing to plan.
  const double gap = track::cyclic_diff(opp.s(), ego.s, s_max);
  if (!opp.valid || gap <= 0.0) return out;

  // Side selection: clearance to each boundary at the opponent.
  const double d_track_left =
      frame.boundary_distance(opp.s(), track::Side::kLeft) - params.d_track_margin;
  const double d_track_right =
      frame.boundary_distance(opp.s(), track::Side::kRight) - params.d_track_margin;
  const double apex_left = apex_offset(opp.d(), +1, params);
  const double apex_right = apex_offset(opp.d(), -1, params);
  const bool left_ok = apex_left <= d_track_left && apex_left >= -d_track_right;
  const bool right_ok = apex_right >= -d_track_right && apex_right <= d_track_left;

  int side = 0;
  if (left_ok && right_ok)
    side = std::abs(apex_left) <= std::abs(apex_right) ? +1 : -1;  // tie goes left
  else if (left_ok)
    side = +1;
  else if (right_ok)
    side = -1;
  else
    return out;  // neither side fits

  const double d_apex = apex_offset(opp.d(), side, params);
  const double alpha_v = velocity_scaler(ego.v_s, params.v_max);

  // Anchors in unwrapped s around the opponent; pre/post points sit on the
  // raceline (d = 0).
  std::vector<double> anchor_s, anchor_d;
  for (int i = params.n_spline - 1; i >= 0; --i) {
    anchor_s.push_back(opp.s() - alpha_v * params.delta_preapex[static_cast<std::size_t>(i)]);
    anchor_d.push_back(0.0);
  }
  anchor_s.push_back(opp.s());
  anchor_d.push_back(d_apex);
  for (int i = 0; i < params.n_spline; ++i) {
    anchor_s.push_back(opp.s() + alpha_v * params.delta_postapex[static_cast<std::size_t>(i)]);
    anchor_d.push_back(0.0);
  }

  const NaturalCubic spline(anchor_s, anchor_d);
  out.splice_begin = anchor_s.front();
  out.splice_end = anchor_s.back();
  out.apex_d = d_apex;
  out.side = side;
  out.is_spline = true;

  // Full-track sampling on the raceline grid with the splice substituted;
  // the global speed profile is copied onto the spline.
  const auto& line = frame.line();
  out.s = line.s;
  out.v = line.v;
  out.d.assign(line.size(), 0.0);
  out.x = line.x;
  out.y = line.y;

  bool within_limits = true;
  for (std::size_t i = 0; i < line.size(); ++i) {
    // Position of this grid point relative to the splice window (cyclic).
    const double rel = track::cyclic_diff(line.s[i], track::wrap_s(out.splice_begin, s_max), s_max);
    if (rel < 0.0 || rel > out.splice_end - out.splice_begin) continue;
    const double d = spline.eval(out.splice_begin + rel);
    out.d[i] = d;
    frame.frenet_to_cartesian(line.s[i], d, out.x[i], out.y[i]);
    const double lim_left = frame.boundary_distance(line.s[i], track::Side::kLeft) -
                            params.d_track_margin;
    const double lim_right = frame.boundary_distance(line.s[i], track::Side::kRight) -
                             params.d_track_margin;
    if (d > lim_left || d < -lim_right) within_limits = false;
  }

  out.valid = within_limits;
  return out;
}

}  // namespace rs::behavior
