#pragma once
#include <memory>
#include <optional>

#include "racestack/behavior/spliner.hpp"
#include "racestack/behavior/state_machine.hpp"
#include "racestack/control/ftg.hpp"
#include "racestack/control/lateral.hpp"
#include "racestack/control/longitudinal.hpp"
#include "racestack/control/steering_lut.hpp"
#include "racestack/estimation/aggregate.hpp"
#include "racestack/estimation/odom_ekf.hpp"
#include "racestack/estimation/particle_filter.hpp"
#include "racestack/estimation/range_lut.hpp"
#include "racestack/harness/scenario.hpp"
#include "racestack/opponent/tracker.hpp"
#include "racestack/track/frenet.hpp"

namespace rs::harness {

// Wall-clock stage timings of one pipeline pass, microseconds. Negative
// values mean instrumentation was off.
struct StageTimings {
  double sensor = -1.0;
  double estimation = -1.0;
  double opponent = -1.0;
  double behavior = -1.0;
  double control = -1.0;
  double total = -1.0;
};

// Everything the pipeline produced in one scan-triggered pass, for
// telemetry composition by the runner.
struct StackOutput {
  sim::DriveCommand command;
  estimation::CarStateEstimate estimate;
  behavior::BehaviorState state = behavior::BehaviorState::kGBFree;
  std::vector<opponent::Obstacle> detections;
  opponent::OpponentEstimate tracker;
  bool opp_in_los = false;
  StageTimings timings;
};

// One car's see-think-act pipeline: state estimation, opponent estimation,
// behavior, control. Stepped by the runner on the sensor clocks.
class Stack {
 public:
  Stack(const StackConfig& cfg, const track::FrenetFrame& frame,
        const track::OccupancyGrid& grid, const estimation::RangeLut* range_lut,
        std::shared_ptr<const control::SteeringLookupTable> steer_lut,
        const sim::SingleTrackParams& vehicle, std::uint64_t seed, bool latency_enabled,
        double detection_noise_sigma);

  // 50 Hz proprioceptive fusion.
  void on_imu_odom(const sim::ImuSample& imu, const sim::WheelOdomSample& odom);

  // 40 Hz scan-triggered pass. truth is used for the configured
  // ground-truth(-noisy) localization paths.
  StackOutput on_scan(const sim::LaserScan& scan, const sim::CarState& truth, double now);

  void notify_reset(const sim::CarState& truth);
  behavior::BehaviorState state() const { return state_; }
  const track::FrenetFrame& frame() const { return frame_; }

 private:
  void run_estimation(const sim::LaserScan& scan, const sim::CarState& truth, double now,
                      estimation::CarStateEstimate& out);
  void run_opponent(const sim::LaserScan& scan, const estimation::CarStateEstimate& est,
                    double now, StackOutput& out);
  behavior::TransitionInputs derive_conditions(const estimation::CarStateEstimate& est,
                                               const StackOutput& out, double now);
  sim::DriveCommand run_control(const sim::LaserScan& scan,
                                const estimation::CarStateEstimate& est, StackOutput& out);

  StackConfig cfg_;
  const track::FrenetFrame& frame_;
  const track::OccupancyGrid& grid_;
  std::shared_ptr<const control::SteeringLookupTable> steer_lut_;
  sim::SingleTrackParams vehicle_;
  bool latency_enabled_;
  double detection_noise_sigma_;

  estimation::OdomEkf ekf_;
  std::unique_ptr<estimation::ParticleFilter> pf_;
  estimation::NoisyPoseStub pose_stub_;
  estimation::StateAggregator aggregator_;
  opponent::OpponentTracker tracker_;
  behavior::BehaviorState state_ = behavior::BehaviorState::kGBFree;
  behavior::LocalTrajectory global_traj_;
  behavior::LocalTrajectory overtake_traj_;
  Rng detection_rng_;

  double last_scan_time_ = -1.0;
  double pf_last_yaw_ = 0.0;
  bool pf_initialized_ = false;
  double clear_since_ = -1.0;
  bool last_ofc_ = false;
};

}  // namespace rs::harness
