#include "racestack/control/longitudinal.hpp"

#include <algorithm>
#include <cmath>

namespace rs::control {

double nominal_velocity(const track::FrenetPose& ego, const behavior::LocalTrajectory& traj,
                        const track::FrenetFrame& frame, const LongitudinalParams& p) {
  const double s_max = frame.s_max();
  const double s_la = p.t_la * ego.v_s;
  // Profile lookup on the 0.1 m grid.
  const double step = frame.line().step;
  const double s_lookup = track::wrap_s(std::round((ego.s + s_la) / step) * step, s_max);
  const std::size_t idx =
      static_cast<std::size_t>(std::llround(s_lookup / step)) % traj.v.size();
  const double v_ref = traj.v[idx];

  const double d_norm = clamp01(std::abs(ego.d) / p.d_track);
  const double c_norm = clamp01(std::abs(frame.curvature_at(ego.s)) / p.curvlim);
  const double alpha_lat_dev = 1.0 + p.lambda_lat * (-1.0 + std::exp(-d_norm * c_norm));
  return alpha_lat_dev * v_ref;
}

double trailing_velocity(const track::FrenetPose& ego, double opp_s, double opp_v_s,
                         double s_max, const LongitudinalParams& p, bool in_los) {
  // Measured gap is the wrapped opponent-ahead distance.
  const double gap = track::wrap_s(opp_s - ego.s, s_max);
  const double e_gap = p.gap_target - gap;
  const double dv = ego.v_s - opp_v_s;
  const double v_des = opp_v_s - (p.k_p * e_gap + p.k_d * dv);
  if (in_los) return std::max(0.0, v_des);
  return std::max(p.v_blind, v_des);
}

std::optional<TrailingTarget> select_trailing_target(
    const track::FrenetPose& ego, const opponent::OpponentEstimate& opp,
    const std::vector<opponent::StaticObstacle>& statics, double s_max, double horizon) {
  std::optional<TrailingTarget> best_dynamic, best_static;

  if (opp.valid) {
    const double gap = track::wrap_s(opp.s() - ego.s, s_max);
    if (gap > 0.0 && gap <= horizon) {
      TrailingTarget t{opp.s(), opp.is_static ? 0.0 : opp.v_s(), !opp.is_static};
      if (t.is_dynamic)
        best_dynamic = t;
      else
        best_static = t;
    }
  }
  for (const auto& st : statics) {
    if (st.observations < 3) continue;
    const double gap = track::wrap_s(st.s - ego.s, s_max);
    if (gap <= 0.0 || gap > horizon) continue;
    if (!best_static || gap < track::wrap_s(best_static->s - ego.s, s_max))
      best_static = TrailingTarget{st.s, 0.0, false};
  }

  // Dynamic obstacles take precedence; static ones are usually leftovers of
  // false positives during a race.
  if (best_dynamic) return best_dynamic;
  return best_static;
}

}  // namespace rs::control
