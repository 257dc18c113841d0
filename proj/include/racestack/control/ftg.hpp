#pragma once
#include "racestack/sim/lidar.hpp"

namespace rs::control {

struct FtgParams {
  double bubble_radius = 0.4;    // m, zeroed disc around the closest return
  double threshold = 1.5;        // m, minimum range counted as gap
  double steer_gain = 0.8;       // steering per rad of gap-center bearing
  double v_straight = 3.0;       // m/s when the gap is dead ahead
  double v_turn = 1.2;           // m/s at large bearing
  double delta_max = 0.4;        // rad
};

struct FtgCommand {
  double v = 0.0;
  double delta = 0.0;
  bool blocked = false;  // no gap above threshold anywhere
};

// Reactive follow-the-gap: erase a safety bubble around the closest return,
// find the widest above-threshold gap, steer toward its center with speed
// scheduled by the bearing magnitude. A fully blocked scan stops the car.
FtgCommand ftg_command(const sim::LaserScan& scan, const FtgParams& params);

}  // namespace rs::control
