#include "racestack/control/ftg.hpp"

#include <algorithm>
#include <cmath>

namespace rs::control {

FtgCommand ftg_command(const sim::LaserScan& scan, const FtgParams& params) {
  FtgCommand cmd;
  if (scan.ranges.empty()) {
    cmd.blocked = true;
    return cmd;
  }

  std::vector<double> ranges = scan.ranges;

  // Erase a bubble around the closest return.
  std::size_t closest = 0;
  for (std::size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i] < ranges[closest]) closest = i;
  if (ranges[closest] < scan.range_max - 1e-9) {
    const double half_angle = std::atan2(params.bubble_radius, std::max(ranges[closest], 0.1));
    const int half_beams = static_cast<int>(std::ceil(half_angle / scan.increment));
    const int lo = std::max(0, static_cast<int>(closest) - half_beams);
    const int hi = std::min(static_cast<int>(ranges.size()) - 1,
                            static_cast<int>(closest) + half_beams);
    for (int i = lo; i <= hi; ++i) ranges[static_cast<std::size_t>(i)] = 0.0;
  }

  // Widest contiguous run above the threshold.
  std::size_t best_start = 0, best_len = 0, run_start = 0, run_len = 0;
  for (std::size_t i = 0; i <= ranges.size(); ++i) {
    if (i < ranges.size() && ranges[i] >= params.threshold) {
      if (run_len == 0) run_start = i;
      ++run_len;
    } else {
      if (run_len > best_len) {
        best_len = run_len;
        best_start = run_start;
      }
      run_len = 0;
    }
  }

  if (best_len == 0) {
    cmd.blocked = true;
    return cmd;  // safety stop
  }

  const std::size_t center = best_start + best_len / 2;
  const double bearing = scan.beam_angle(center);
  cmd.delta = std::clamp(params.steer_gain * bearing, -params.delta_max, params.delta_max);
  const double t = clamp01(std::abs(bearing) / (kPi / 4.0));
  cmd.v = params.v_straight + t * (params.v_turn - params.v_straight);
  return cmd;
}

}  // namespace rs::control
