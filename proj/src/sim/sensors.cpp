#include "racestack/sim/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace rs::sim {

void sample_sensors(const CarState& state, const BodyAccel& accel, const DriveCommand& cmd,
                    double drive_effort, const SingleTrackParams& params,
                    const SensorNoise& noise, Rng& rng, ImuSample& imu, WheelOdomSample& odom) {
  imu.stamp = state.t;
  odom.stamp = state.t;

  const bool on = noise.enabled;
  imu.a_x = accel.a_x + (on ? rng.gaussian(0.0, noise.imu_sigma_a) : 0.0);
  imu.a_y = accel.a_y + (on ? rng.gaussian(0.0, noise.imu_sigma_a) : 0.0);
  imu.yaw_rate = state.yaw_rate + (on ? rng.gaussian(0.0, noise.imu_sigma_gyro) : 0.0);
  imu.yaw = wrap_to_pi(state.pose.psi + (on ? rng.gaussian(0.0, noise.imu_sigma_yaw) : 0.0));

  // Wheelspin makes the motor-derived speed over-report; only positive drive
  // effort contributes.
  const double spin = std::clamp(drive_effort, 0.0, 1.0);
  const double slip_bias = on ? noise.slip_bias_base + noise.slip_bias_accel * spin : 0.0;
  odom.v_x = state.v_x * (1.0 + slip_bias) + (on ? rng.gaussian(0.0, noise.odom_sigma_v) : 0.0);
  const double L = params.wheelbase();
  odom.yaw_rate = odom.v_x * std::tan(cmd.delta_des) / L;
  odom.v_y = odom.yaw_rate * params.l_r;
}

}  // namespace rs::sim
