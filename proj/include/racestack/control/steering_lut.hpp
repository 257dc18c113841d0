#pragma once
#include <string>
#include <vector>

#include "racestack/sim/vehicle.hpp"

namespace rs::control {

// Steady-state (lateral acceleration -> steering angle) map per velocity,
// generated by rolling out the single-track model at fixed speed and
// steering until the yaw rate settles. Entries within a row are strictly
// increasing in a_c up to the stability edge.
struct SteeringLookupTable {
  struct Entry {
    float a_c = 0.0f;    // m/s^2
    float delta = 0.0f;  // rad
  };

  double v_min = 0.5;
  double v_step = 0.1;
  std::vector<std::vector<Entry>> rows;  // one per velocity

  std::size_t row_count() const { return rows.size(); }
  double velocity_of_row(std::size_t i) const { return v_min + static_cast<double>(i) * v_step; }

  // Inverse lookup: steering angle producing a_c at speed v, linear in both
  // axes, clamped to the stable-region edge. saturated reports the clamp.
  double steering_for(double v, double a_c, bool* saturated = nullptr) const;

  // Forward interpolation a_c(v, delta) within the stable region; negative
  // return means the pair is unstable/outside the table.
  double lateral_accel_for(double v, double delta) const;
};

struct LutGenConfig {
  double v_min = 0.5;
  double v_max = 7.0;
  double v_step = 0.1;
  double delta_max = 0.4;
  double delta_step = 0.01;
  double delta_fine_step = 0.0033;  // below delta_fine_limit
  double delta_fine_limit = 0.1;
  double sim_time = 2.0;            // s per rollout
  double settle_window = 0.2;       // s, steadiness check window
  double settle_tol = 1e-3;         // rad/s, max yaw-rate spread in window
  double dt = 1e-3;
};

SteeringLookupTable generate_steering_lut(const sim::SingleTrackParams& params,
                                          const LutGenConfig& cfg = {});

// Little-endian binary format with a versioned header.
void save_lut(const SteeringLookupTable& lut, const std::string& path);
SteeringLookupTable load_lut(const std::string& path);

}  // namespace rs::control
