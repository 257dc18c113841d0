#pragma once
#include <string>

#include "racestack/harness/metrics.hpp"
#include "racestack/harness/scenario.hpp"
#include "racestack/harness/telemetry.hpp"

namespace rs::harness {

struct RunResult {
  TelemetryLog telemetry;
  RunMetrics metrics;
};

// Single-car run: physics at 1 kHz, IMU/odometry at 50 Hz, scan-triggered
// pipeline at 40 Hz. A boundary collision records a crash and ends the run.
// `laps` in the scenario counts start-line crossings to run (0: duration).
RunResult run_time_trials(const Scenario& scenario);

// Two cars on a shared clock. The ego runs the full pipeline including
// opponent estimation from its own scans; the opponent follows its own
// (scaled or altered) line on ground-truth state, or drives reactively.
// Car-to-car collisions reset both cars with the offender behind.
RunResult run_head_to_head(const Scenario& scenario);

}  // namespace rs::harness
