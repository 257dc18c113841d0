#pragma once
#include "racestack/common/rng.hpp"
#include "racestack/sim/vehicle.hpp"

namespace rs::sim {

struct ImuSample {
  double a_x = 0.0;      // m/s^2
  double a_y = 0.0;
  double yaw_rate = 0.0; // rad/s
  double yaw = 0.0;      // rad
  double stamp = 0.0;
};

struct WheelOdomSample {
  double v_x = 0.0;      // m/s, from motor speed, slip-biased
  double v_y = 0.0;      // m/s, derived from commanded steering
  double yaw_rate = 0.0; // rad/s
  double stamp = 0.0;
};

enum class SlipLevel { kHighGrip, kLowGrip };

// Noise magnitudes are synthetic defaults; the reference hardware noise is
// not quantified, so everything here is a config knob.
struct SensorNoise {
  double imu_sigma_a = 0.2;        // m/s^2
  double imu_sigma_gyro = 0.02;    // rad/s
  double imu_sigma_yaw = 0.01;     // rad
  double odom_sigma_v = 0.05;      // m/s
  double slip_bias_base = 0.0;     // constant multiplicative wheel-speed bias
  double slip_bias_accel = 0.02;   // extra bias at full drive effort
  bool enabled = true;

  static SensorNoise for_level(SlipLevel level) {
    SensorNoise n;
    if (level == SlipLevel::kLowGrip) {
      n.slip_bias_base = 0.05;
      n.slip_bias_accel = 0.25;  // wheel speed up to +30% under wheelspin
    }
    return n;
  }
};

// Samples both proprioceptive sensors at the current state. drive_effort is
// the normalized commanded acceleration in [-1, 1]; positive effort produces
// wheelspin bias so the wheel odometry over-reports speed.
void sample_sensors(const CarState& state, const BodyAccel& accel, const DriveCommand& cmd,
                    double drive_effort, const SingleTrackParams& params,
                    const SensorNoise& noise, Rng& rng, ImuSample& imu, WheelOdomSample& odom);

}  // namespace rs::sim
