#pragma once
#include <string>
#include <vector>

#include "racestack/harness/telemetry.hpp"

namespace rs::harness {

struct LatencyStats {
  double mean_us = 0.0;
  double max_us = 0.0;
  std::vector<std::size_t> histogram;  // decade buckets: <1us ... >=100ms
  std::size_t samples = 0;
};

struct RunMetrics {
  std::vector<double> lap_times;
  int lap_count = 0;
  double mean_lap_time = 0.0;
  double lap_time_stddev = 0.0;

  double lateral_rmse = 0.0;
  double lateral_mean_abs = 0.0;
  double lateral_max = 0.0;

  double velocity_tracking_rmse = 0.0;

  // Trailing gap error against the reference gap (meta.gap_target), counted
  // from the first time the reference is reached.
  double gap_error_mean_abs = 0.0;
  double gap_error_max = 0.0;        // transient, after first reach
  double gap_error_steady_max = 0.0; // final 25% of the trailing span
  bool gap_reached = false;

  // Detection quality over scan opportunities.
  int det_opportunities = 0;
  int det_tp = 0, det_fp = 0, det_fn = 0;
  double tpr = 0.0;
  double fdr = 0.0;

  // Opponent tracking accuracy (dynamic target in line of sight).
  double opp_pos_rmse = 0.0;
  double opp_vs_rmse = 0.0;

  int overtakes_completed = 0;
  int collisions = 0;
  int collisions_ego_fault = 0;
  bool crashed = false;

  bool winner_ego = false;  // head-to-head only

  bool latency_present = false;
  LatencyStats lat_sensor, lat_estimation, lat_opponent, lat_behavior, lat_control, lat_total;
};

// Pure fold over the telemetry log; recomputing from the saved file
// reproduces the live metrics exactly.
RunMetrics compute_metrics(const TelemetryLog& log);

std::string metrics_to_json(const RunMetrics& m);

// Per-tick CSV series (t, lateral error, gap error, commanded/actual speed).
void save_metrics_csv(const TelemetryLog& log, const std::string& path);

}  // namespace rs::harness
