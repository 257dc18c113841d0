#include "racestack/harness/stack.hpp"

#include <chrono>
#include <cmath>

namespace rs::harness {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point from) {
  return std::chrono::duration<double, std::micro>(Clock::now() - from).count();
}

}  // namespace

Stack::Stack(const StackConfig& cfg, const track::FrenetFrame& frame,
             const track::OccupancyGrid& grid, const estimation::RangeLut* range_lut,
             std::shared_ptr<const control::SteeringLookupTable> steer_lut,
             const sim::SingleTrackParams& vehicle, std::uint64_t seed, bool latency_enabled,
             double detection_noise_sigma)
    : cfg_(cfg),
      frame_(frame),
      grid_(grid),
      steer_lut_(std::move(steer_lut)),
      vehicle_(vehicle),
      latency_enabled_(latency_enabled),
      detection_noise_sigma_(detection_noise_sigma),
      ekf_(estimation::FusionConfig::defaults()),
      pose_stub_(cfg.gt_pose_sigma_xy, cfg.gt_pose_sigma_psi, seed ^ 0x9d2c5680f1a3c9b5ULL),
      aggregator_(frame),
      tracker_(frame, cfg.tracker),
      detection_rng_(seed ^ 0x2545f4914f6cdd1dULL) {
  if (cfg_.localization == LocalizationKind::kMcl) {
    if (!range_lut) throw std::invalid_argument("Stack: MCL localization needs a range LUT");
    pf_ = std::make_unique<estimation::ParticleFilter>(grid_, *range_lut, cfg_.mcl,
                                                       seed ^ 0x94d049bb133111ebULL);
  }
  global_traj_ = behavior::global_as_trajectory(frame_);
  cfg_.longitudinal.d_track =
      std::max(0.2, frame_.boundary_distance(0.0, track::Side::kLeft) - 0.1);
}

void Stack::on_imu_odom(const sim::ImuSample& imu, const sim::WheelOdomSample& odom) {
  const double dt = std::clamp(imu.stamp - ekf_.last_stamp(), 1e-4, 0.1);
  ekf_.predict(dt);
  ekf_.update_imu(imu);
  ekf_.update_wheel_odom(odom);
}

void Stack::notify_reset(const sim::CarState& truth) {
  state_ = behavior::BehaviorState::kGBFree;
  overtake_traj_ = behavior::LocalTrajectory{};
  if (pf_) {
    pf_->initialize(truth.pose);
    pf_last_yaw_ = truth.pose.psi;
  }
}

void Stack::run_estimation(const sim::LaserScan& scan, const sim::CarState& truth, double now,
                           estimation::CarStateEstimate& out) {
  switch (cfg_.localization) {
    case LocalizationKind::kGroundTruth:
      aggregator_.push_pose(truth.pose, now);
      aggregator_.push_velocity(truth.v_x, truth.v_y, truth.yaw_rate, now);
      break;
    case LocalizationKind::kGroundTruthNoisy:
      aggregator_.push_pose(pose_stub_.sample(truth.pose), now);
      aggregator_.push_velocity(ekf_.v_x(), ekf_.v_y(), ekf_.yaw_rate(), now);
      break;
    case LocalizationKind::kMcl: {
      if (!pf_initialized_) {
        pf_->initialize(truth.pose);
        pf_last_yaw_ = truth.pose.psi;
        pf_initialized_ = true;
      }
      const double dt = last_scan_time_ >= 0.0 ? now - last_scan_time_ : 0.0;
      if (dt > 0.0) {
        // Body-frame odometry increment integrated from the velocity filter.
        const double dyaw = ekf_.yaw_rate() * dt;
        const double dx = ekf_.v_x() * dt;
        const double dy = ekf_.v_y() * dt;
        pf_->motion_update(dx, dy, dyaw);
      }
      pf_->sensor_update(scan);
      aggregator_.push_pose(pf_->estimate(), now);
      aggregator_.push_velocity(ekf_.v_x(), ekf_.v_y(), ekf_.yaw_rate(), now);
      break;
    }
  }
  out = aggregator_.aggregate(now);
}

void Stack::run_opponent(const sim::LaserScan& scan, const estimation::CarStateEstimate& est,
                         double now, StackOutput& out) {
  out.detections = opponent::detect(scan, est.pose, frame_, cfg_.detection);
  if (detection_noise_sigma_ > 0.0) {
    for (auto& det : out.detections) {
      det.s_center = track::wrap_s(
          det.s_center + detection_rng_.gaussian(0.0, detection_noise_sigma_), frame_.s_max());
      det.d_center += detection_rng_.gaussian(0.0, detection_noise_sigma_);
    }
  }

  // LoS against the predicted opponent position (or the freshest detection
  // while the filter is still unseeded).
  bool los = false;
  const auto& current = tracker_.estimate();
  double ref_s = 0.0, ref_d = 0.0;
  bool have_ref = false;
  if (current.valid) {
    ref_s = current.s();
    ref_d = current.d();
    have_ref = true;
  } else if (!out.detections.empty()) {
    ref_s = out.detections.front().s_center;
    ref_d = out.detections.front().d_center;
    have_ref = true;
  }
  if (have_ref) {
    double ox, oy;
    frame_.frenet_to_cartesian(ref_s, ref_d, ox, oy);
    los = opponent::line_of_sight(est.pose, ox, oy, grid_, cfg_.tracker.max_viewing_distance);
  }

  const double dt = last_scan_time_ >= 0.0 ? now - last_scan_time_ : 0.0;
  if (dt > 0.0) tracker_.predict(dt, los);
  tracker_.update(out.detections, now);
  out.tracker = tracker_.estimate();
  out.opp_in_los = los;
}

behavior::TransitionInputs Stack::derive_conditions(const estimation::CarStateEstimate& est,
                                                    const StackOutput& out, double now) {
  behavior::TransitionInputs in;
  const double s_max = frame_.s_max();

  if (out.tracker.valid) {
    const double gap = track::wrap_s(out.tracker.s() - est.frenet.s, s_max);
    const double corridor =
        frame_.boundary_distance(out.tracker.s(), track::Side::kLeft) +
        frame_.boundary_distance(out.tracker.s(), track::Side::kRight);
    in.opp = gap > 0.0 && gap <= cfg_.behavior.opp_horizon &&
             std::abs(out.tracker.d()) < corridor / 2.0;
    in.done = track::cyclic_diff(out.tracker.s(), est.frenet.s, s_max) <
              -cfg_.behavior.done_margin;
  }

  // Overtake feasibility: a valid spline, a matured track, the opponent
  // close enough for the spline anchors to matter, and a real speed
  // advantage.
  if (in.opp && !cfg_.trailing_only && !out.tracker.is_static && out.tracker.updates >= 10) {
    const double gap = track::wrap_s(out.tracker.s() - est.frenet.s, s_max);
    // The frame's profile is already sector-scaled by the runner.
    const double line_speed = frame_.velocity_at(out.tracker.s());
    const bool speed_ok =
        line_speed >= cfg_.behavior.ot_speed_advantage * std::max(out.tracker.v_s(), 0.0);
    const double engage = cfg_.spliner.delta_preapex.back() * 1.5 + 1.0;
    in.ot = speed_ok && overtake_traj_.valid && gap <= engage;
  }

  const bool ofc_now = est.stale || (pf_ && pf_->diverged());
  in.ofc = ofc_now;
  if (ofc_now) {
    clear_since_ = -1.0;
  } else {
    if (clear_since_ < 0.0) clear_since_ = now;
    in.ic = now - clear_since_ >= cfg_.behavior.ic_clear_time;
  }
  last_ofc_ = ofc_now;
  return in;
}

sim::DriveCommand Stack::run_control(const sim::LaserScan& scan,
                                     const estimation::CarStateEstimate& est, StackOutput& out) {
  sim::DriveCommand cmd;

  if (state_ == behavior::BehaviorState::kReactive ||
      cfg_.controller == ControllerKind::kFtg) {
    const control::FtgCommand ftg = control::ftg_command(scan, control::FtgParams{});
    cmd.v_des = ftg.v;
    cmd.delta_des = ftg.delta;
    return cmd;
  }

  const behavior::LocalTrajectory& traj =
      state_ == behavior::BehaviorState::kOvertake && overtake_traj_.valid ? overtake_traj_
                                                                           : global_traj_;

  const double v_nominal = control::nominal_velocity(est.frenet, traj, frame_, cfg_.longitudinal);
  double v_cmd = v_nominal;
  if (state_ == behavior::BehaviorState::kTrailing) {
    const auto target = control::select_trailing_target(
        est.frenet, out.tracker, tracker_.static_obstacles(), frame_.s_max(),
        cfg_.behavior.opp_horizon);
    if (target) {
      const double v_trail =
          control::trailing_velocity(est.frenet, target->s, target->v_s, frame_.s_max(),
                                     cfg_.longitudinal, out.opp_in_los);
      // The nominal profile stays an upper bound; trailing may only slow us.
      v_cmd = std::min(v_trail, v_nominal);
    }
  }

  double delta = 0.0;
  if (cfg_.controller == ControllerKind::kMap) {
    delta = control::map_steering(est.pose, est.v_x, traj, frame_, est.frenet.s, *steer_lut_,
                                  cfg_.lateral);
  } else {
    delta = control::pure_pursuit_steering(est.pose, est.v_x, traj, frame_, est.frenet.s,
                                           cfg_.lateral);
  }
  cmd.v_des = v_cmd;
  cmd.delta_des = delta;
  return cmd;
}

StackOutput Stack::on_scan(const sim::LaserScan& scan, const sim::CarState& truth, double now) {
  StackOutput out;
  const auto t_start = Clock::now();

  auto t0 = Clock::now();
  run_estimation(scan, truth, now, out.estimate);
  if (latency_enabled_) out.timings.estimation = elapsed_us(t0);

  if (cfg_.perception) {
    t0 = Clock::now();
    run_opponent(scan, out.estimate, now, out);
    if (latency_enabled_) out.timings.opponent = elapsed_us(t0);
  }

  t0 = Clock::now();
  // The overtake trajectory is refreshed whenever an opponent is engaged so
  // `ot` reflects current feasibility.
  if (cfg_.perception && out.tracker.valid && !out.tracker.is_static) {
    overtake_traj_ = behavior::plan_overtake(out.tracker, out.estimate.frenet, frame_,
                                             cfg_.spliner);
  } else {
    overtake_traj_ = behavior::LocalTrajectory{};
  }
  const behavior::TransitionInputs inputs = derive_conditions(out.estimate, out, now);
  const behavior::BehaviorState next = behavior::transition(state_, inputs);
  // Overtake without a usable spline falls back to trailing on the global
  // line.
  state_ = next;
  if (state_ == behavior::BehaviorState::kOvertake && !overtake_traj_.valid)
    state_ = behavior::BehaviorState::kTrailing;
  if (latency_enabled_) out.timings.behavior = elapsed_us(t0);
  out.state = state_;

  t0 = Clock::now();
  out.command = run_control(scan, out.estimate, out);
  if (latency_enabled_) out.timings.control = elapsed_us(t0);

  if (latency_enabled_) out.timings.total = elapsed_us(t_start);
  last_scan_time_ = now;
  return out;
}

}  // namespace rs::harness
