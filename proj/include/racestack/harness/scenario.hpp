#pragma once
#include <optional>
#include <string>

#include "racestack/behavior/spliner.hpp"
#include "racestack/control/lateral.hpp"
#include "racestack/control/longitudinal.hpp"
#include "racestack/estimation/odom_ekf.hpp"
#include "racestack/estimation/particle_filter.hpp"
#include "racestack/opponent/detection.hpp"
#include "racestack/opponent/tracker.hpp"
#include "racestack/planner/sectors.hpp"
#include "racestack/sim/lidar.hpp"
#include "racestack/sim/sensors.hpp"
#include "racestack/sim/vehicle.hpp"

namespace rs::harness {

enum class ControllerKind { kMap, kPurePursuit, kFtg };
enum class LocalizationKind { kGroundTruth, kGroundTruthNoisy, kMcl };

// Behavior condition thresholds (the named booleans of the state machine).
struct BehaviorThresholds {
  double opp_horizon = 8.0;        // m ahead along s for `opp`
  double ot_speed_advantage = 1.10;  // ego line speed vs opponent v_s for `ot`
  double done_margin = 0.5;        // m, one car length behind for `done`
  double ic_clear_time = 1.0;      // s both flags clear for `ic`
};

struct StackConfig {
  ControllerKind controller = ControllerKind::kMap;
  LocalizationKind localization = LocalizationKind::kGroundTruth;
  bool perception = false;
  bool trailing_only = false;  // pin the behavior to trailing (no overtakes)
  double sector_scaler = 0.75;             // uniform scaler...
  std::optional<std::string> sectors_file; // ...unless a sector file is given

  control::LongitudinalParams longitudinal;
  control::LateralParams lateral;
  behavior::SplinerParams spliner;
  opponent::DetectionParams detection;
  opponent::TrackerParams tracker;
  estimation::ParticleFilterConfig mcl;
  BehaviorThresholds behavior;
  double gt_pose_sigma_xy = 0.03;   // ground-truth-with-noise stub
  double gt_pose_sigma_psi = 0.01;
};

enum class OpponentKind { kNone, kRaceline, kAlteredRaceline, kFtg, kScripted };

struct OpponentSpec {
  OpponentKind kind = OpponentKind::kNone;
  double scaler = 0.66;            // velocity fraction of its line profile
  double speed = 2.0;              // m/s for ftg / scripted
  std::string raceline;            // altered-line CSV (empty: ego's line)
  double start_s = 0.0;            // m ahead of the ego start
};

struct Scenario {
  std::string map_yaml;
  std::string raceline_csv;
  std::uint64_t seed = 1;
  double duration = 60.0;          // s cap
  int laps = 0;                    // 0: run by duration only

  sim::SingleTrackParams vehicle;
  sim::SensorNoise noise;
  sim::LidarConfig lidar;
  sim::SlipLevel slip = sim::SlipLevel::kHighGrip;
  double detection_noise_sigma = 0.0;  // extra noise on detection centers
  bool latency_enabled = true;

  StackConfig ego;
  OpponentSpec opponent;
};

Scenario load_scenario_yaml(const std::string& path);
void save_scenario_yaml(const Scenario& scenario, const std::string& path);

}  // namespace rs::harness
