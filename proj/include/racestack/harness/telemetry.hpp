#pragma once
#include <string>
#include <vector>

namespace rs::harness {

// One record per control tick (40 Hz), newline-delimited JSON on disk.
// Metrics are a pure fold over these records, so everything a metric needs
// is carried here.
struct TelemetryRecord {
  double t = 0.0;

  // Ego ground truth.
  double x = 0.0, y = 0.0, psi = 0.0;
  double v_x = 0.0, v_y = 0.0, yaw_rate = 0.0;
  double s = 0.0, d = 0.0;

  // Ego estimate.
  double est_x = 0.0, est_y = 0.0, est_psi = 0.0;
  double est_v_x = 0.0;
  double est_s = 0.0, est_d = 0.0;
  bool est_stale = false;

  // Commands and behavior.
  double cmd_v = 0.0, cmd_delta = 0.0;
  int state = 0;  // BehaviorState as int

  // Opponent (when present): truth and tracker view.
  bool has_opponent = false;
  double opp_s = 0.0, opp_d = 0.0, opp_v_s = 0.0;
  bool opp_in_los = false;
  bool trk_valid = false;
  double trk_s = 0.0, trk_d = 0.0, trk_v_s = 0.0;
  bool trk_static = false;
  int detections = 0;
  int det_tp = 0, det_fp = 0;
  bool det_opportunity = false;

  // Events.
  bool lap_crossing = false;
  bool collision = false;
  bool collision_offender_ego = false;
  bool overtake_completed = false;

  // Per-stage latency, microseconds (negative: instrumentation off).
  double lat_sensor = -1.0, lat_estimation = -1.0, lat_opponent = -1.0;
  double lat_behavior = -1.0, lat_control = -1.0, lat_total = -1.0;
};

// Run header carried as the first line of the telemetry file.
struct TelemetryMeta {
  double s_max = 0.0;
  double gap_target = 0.0;
  double car_length = 0.5;
  int target_laps = 0;
  std::uint64_t seed = 0;
  std::string mode;  // "tt" or "h2h"
};

struct TelemetryLog {
  TelemetryMeta meta;
  std::vector<TelemetryRecord> records;
};

void save_telemetry(const TelemetryLog& log, const std::string& path);
TelemetryLog load_telemetry(const std::string& path);

std::string record_to_json(const TelemetryRecord& r);
std::string meta_to_json(const TelemetryMeta& m);

}  // namespace rs::harness
