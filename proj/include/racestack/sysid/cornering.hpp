#pragma once
#include <string>
#include <vector>

#include "racestack/sim/vehicle.hpp"

namespace rs::sysid {

struct CorneringSample {
  double v_x = 0.0;
  double yaw_rate = 0.0;
  double a_lat = 0.0;     // m/s^2, v_x * yaw_rate at quasi-steady state
  double delta = 0.0;     // rad
  double alpha_f = 0.0;   // rad
  double alpha_r = 0.0;
  double f_yf = 0.0;      // N, from the steady-state force balance
  double f_yr = 0.0;
};

struct CorneringDataset {
  std::vector<CorneringSample> samples;
};

struct CorneringConfig {
  std::vector<double> speeds = {3.0, 4.0, 5.0};  // m/s
  double steer_rate = 0.02;                       // rad/s ramp
  double settle_time = 1.5;                       // s before logging starts
  double dt = 1e-3;
  double sample_hz = 50.0;
};

// Drives the model in slow steering ramps at constant speeds and logs
// quasi-steady cornering samples. Axle forces come from the steady-state
// balance: F_yf = m a_lat l_r / (L cos delta), F_yr = m a_lat l_f / L.
// Sweeps truncate at the last stable sample if the car spins out.
CorneringDataset run_cornering_experiment(const sim::SingleTrackParams& params,
                                          const CorneringConfig& cfg = {});

void save_dataset_csv(const CorneringDataset& data, const std::string& path);
CorneringDataset load_dataset_csv(const std::string& path);

}  // namespace rs::sysid
