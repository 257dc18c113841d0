#include <doctest.h>

#include <cmath>

#include "racestack/estimation/aggregate.hpp"
#include "racestack/estimation/odom_ekf.hpp"
#include "racestack/estimation/particle_filter.hpp"
#include "racestack/estimation/range_lut.hpp"
#include "racestack/sim/lidar.hpp"
#include "racestack/track/synth.hpp"

using namespace rs;
using namespace rs::estimation;
using namespace rs::track;

namespace {

OccupancyGrid boxed_grid(int n, double res) {
  OccupancyGrid g;
  g.resolution = res;
  g.width = g.height = n;
  g.origin.x = -n * res / 2.0;
  g.origin.y = -n * res / 2.0;
  g.cells.assign(static_cast<std::size_t>(n) * n, Cell::kFree);
  for (int i = 0; i < n; ++i) {
    g.set(i, 0, Cell::kOccupied);
    g.set(i, n - 1, Cell::kOccupied);
    g.set(0, i, Cell::kOccupied);
    g.set(n - 1, i, Cell::kOccupied);
  }
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("estimation");

TEST_CASE("ekf predict advances position along the heading") {
  OdomEkf::Vec x = OdomEkf::Vec::Zero();
  x(kVx) = 2.0;
  auto out = OdomEkf::transfer(x, 0.1);
  CHECK(out(kX) == doctest::Approx(0.2));
  CHECK(out(kY) == doctest::Approx(0.0));

  // Heading pi/2 moves the body-x velocity into world y.
  x(kYaw) = kPi / 2.0;
  out = OdomEkf::transfer(x, 0.1);
  CHECK(out(kX) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(out(kY) == doctest::Approx(0.2));

  // Pure yaw rate integrates the heading (cos(roll)/cos(pitch) = 1).
  x = OdomEkf::Vec::Zero();
  x(kVyaw) = 1.0;
  out = OdomEkf::transfer(x, 0.1);
  CHECK(out(kYaw) == doctest::Approx(0.1));
}

TEST_CASE("kalman blending keeps the posterior between prior and measurement") {
  OdomEkf ekf;
  sim::WheelOdomSample odom;
  odom.v_x = 2.0;
  odom.stamp = 0.02;
  ekf.predict(0.02);
  ekf.update_wheel_odom(odom);
  CHECK(ekf.v_x() > 0.0);
  CHECK(ekf.v_x() < 2.0);
}

TEST_CASE("disabled acceleration channels leave the state untouched") {
  FusionConfig cfg = FusionConfig::defaults();  // imu accel rows disabled
  OdomEkf ekf(cfg);
  const auto before = ekf.state();
  sim::ImuSample imu;
  imu.a_x = 5.0;
  imu.a_y = -3.0;
  imu.stamp = 0.0;
  // With yaw/yaw-rate zero measurements this only touches those channels.
  ekf.update_imu(imu);
  CHECK(ekf.state()(kAx) == doctest::Approx(before(kAx)));
  CHECK(ekf.state()(kAy) == doctest::Approx(before(kAy)));
}

TEST_CASE("repeated identical measurements converge to the measured value") {
  OdomEkf ekf;
  for (int i = 0; i < 50; ++i) {
    ekf.predict(0.02);
    sim::WheelOdomSample odom;
    odom.v_x = 2.0;
    odom.stamp = 0.02 * (i + 1);
    ekf.update_wheel_odom(odom);
  }
  CHECK(ekf.v_x() == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("stale measurements are dropped with a diagnostic") {
  OdomEkf ekf;
  sim::WheelOdomSample odom;
  odom.v_x = 1.0;
  odom.stamp = 1.0;
  CHECK(ekf.update_wheel_odom(odom));
  odom.stamp = 0.5;
  CHECK_FALSE(ekf.update_wheel_odom(odom));
  CHECK(ekf.dropped_stale() == 1);
}

TEST_CASE("two_d_mode keeps out-of-plane states pinned") {
  OdomEkf ekf;
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    ekf.predict(0.02);
    sim::ImuSample imu;
    imu.yaw = rng.uniform(-kPi, kPi);
    imu.yaw_rate = rng.gaussian(0.0, 1.0);
    imu.stamp = 0.02 * (i + 1);
    ekf.update_imu(imu);
    for (int idx : {kZ, kRoll, kPitch, kVz, kVroll, kVpitch, kAz}) {
      CHECK(std::abs(ekf.state()(idx)) < 1e-3);
      CHECK(ekf.covariance()(idx, idx) == doctest::Approx(1e-6));
    }
  }
}

TEST_CASE("covariance stays symmetric psd over random predict/update cycles") {
  OdomEkf ekf;
  Rng rng(17);
  double stamp = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double dt = rng.uniform(1e-3, 0.05);
    ekf.predict(dt);
    stamp += dt;
    if (rng.uniform() < 0.5) {
      sim::WheelOdomSample odom;
      odom.v_x = rng.gaussian(2.0, 1.0);
      odom.v_y = rng.gaussian(0.0, 0.3);
      odom.stamp = stamp;
      ekf.update_wheel_odom(odom);
    } else {
      sim::ImuSample imu;
      imu.yaw = rng.uniform(-kPi, kPi);
      imu.yaw_rate = rng.gaussian(0.0, 2.0);
      imu.stamp = stamp;
      ekf.update_imu(imu);
    }
    if (i % 1000 == 0) {
      const auto& p = ekf.covariance();
      const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
      CHECK(asym < 1e-9);
      Eigen::SelfAdjointEigenSolver<OdomEkf::Mat> eig(p);
      CHECK(eig.eigenvalues().minCoeff() > -1e-9);
    }
  }
}

TEST_CASE("distance transform matches brute force on small grids") {
  Rng rng(5);
  OccupancyGrid g = boxed_grid(24, 0.1);
  for (int i = 0; i < 18; ++i)
    g.set(static_cast<int>(rng.uniform_index(24)), static_cast<int>(rng.uniform_index(24)),
          Cell::kOccupied);
  const auto d = distance_transform_cells(g);
  for (int y = 0; y < g.height; ++y)
    for (int x = 0; x < g.width; ++x) {
      double best = 1e18;
      for (int qy = 0; qy < g.height; ++qy)
        for (int qx = 0; qx < g.width; ++qx)
          if (g.occupied(qx, qy))
            best = std::min(best, std::hypot(double(qx - x), double(qy - y)));
      CHECK(d[static_cast<std::size_t>(y) * g.width + x] == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("lut ranges match brute-force ray marching within one cell") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    OccupancyGrid g = boxed_grid(32, 0.1);
    for (int i = 0; i < 25; ++i) {
      const int ix = 2 + static_cast<int>(rng.uniform_index(28));
      const int iy = 2 + static_cast<int>(rng.uniform_index(28));
      if (std::abs(ix - 16) < 3 && std::abs(iy - 16) < 3) continue;
      g.set(ix, iy, Cell::kOccupied);
    }
    RangeLut lut(g);
    CHECK(lut.dense());
    // The sphere-tracing march is equivalent to direct ray casting.
    for (int q = 0; q < 200; ++q) {
      const double theta = rng.uniform(-kPi, kPi);
      const double r_marched = lut.range_marched(0.0, 0.0, theta);
      const double r_dda = sim::cast_ray(g, 0.0, 0.0, theta, 10.0);
      CHECK(std::abs(r_marched - r_dda) <= 1e-9);
    }
    // The dense table reproduces the march at its own discretization: cell
    // centers and 1-degree heading bins (the documented trade).
    for (int q = 0; q < 100; ++q) {
      const int ix = 4 + static_cast<int>(rng.uniform_index(24));
      const int iy = 4 + static_cast<int>(rng.uniform_index(24));
      if (g.occupied(ix, iy)) continue;
      double wx, wy;
      g.grid_to_world(ix + 0.5, iy + 0.5, wx, wy);
      const int bin = static_cast<int>(rng.uniform_index(360));
      const double theta = 2.0 * kPi * bin / 360.0;
      const double r_lut = lut.range(wx, wy, theta);
      const double r_marched = lut.range_marched(wx, wy, theta);
      CHECK(std::abs(r_lut - r_marched) <= g.resolution);
    }
  }
}

TEST_CASE("lut on a 1024x1024 grid stays within the memory bound") {
  OccupancyGrid g = boxed_grid(1024, 0.05);
  RangeLut::Config cfg;
  const RangeLut lut(g, cfg);
  // Dense table would need 1024*1024*360*2 bytes (~755 GB at fp64, 700+ MB
  // at uint16): over budget, so the distance-field fallback must engage.
  CHECK_FALSE(lut.dense());
  CHECK(lut.memory_bytes() < (16u << 20));
  // Queries still answer in bounded time and agree with direct casting.
  const double r = lut.range(0.0, 0.0, 0.0);
  const double expect = sim::cast_ray(g, 0.0, 0.0, 0.0, 10.0);
  CHECK(std::abs(r - expect) <= 2.0 * g.resolution);
}

TEST_CASE("motion update: zero delta with zero alphas leaves particles fixed") {
  OccupancyGrid g = boxed_grid(32, 0.1);
  RangeLut lut(g);
  ParticleFilterConfig cfg;
  cfg.alpha1 = cfg.alpha2 = cfg.alpha3 = cfg.alpha4 = 0.0;
  ParticleFilter pf(g, lut, cfg, 1);
  pf.initialize(Pose2D{0, 0, 0}, 0.0, 0.0);
  pf.motion_update(0.0, 0.0, 0.0);
  for (const auto& p : pf.particles()) {
    CHECK(p.pose.x == 0.0);
    CHECK(p.pose.y == 0.0);
    CHECK(p.pose.psi == 0.0);
  }
}

TEST_CASE("motion update translation variance follows alpha3") {
  OccupancyGrid g = boxed_grid(32, 0.1);
  RangeLut lut(g);
  ParticleFilterConfig cfg;
  cfg.particle_count = 10000;
  ParticleFilter pf(g, lut, cfg, 2);
  pf.initialize(Pose2D{0, 0, 0}, 0.0, 0.0);
  pf.motion_update(1.0, 0.0, 0.0);  // pure 1 m translation

  double mean = 0.0, var = 0.0;
  for (const auto& p : pf.particles()) mean += p.pose.x;
  mean /= static_cast<double>(cfg.particle_count);
  for (const auto& p : pf.particles()) var += (p.pose.x - mean) * (p.pose.x - mean);
  var /= static_cast<double>(cfg.particle_count);
  // var_trans = alpha3 * 1 + alpha4 * 0
  CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(var == doctest::Approx(cfg.alpha3 * 1.0).epsilon(0.08));
}

TEST_CASE("motion update rotation variance follows alpha1") {
  OccupancyGrid g = boxed_grid(32, 0.1);
  RangeLut lut(g);
  ParticleFilterConfig cfg;
  cfg.particle_count = 10000;
  ParticleFilter pf(g, lut, cfg, 3);
  pf.initialize(Pose2D{0, 0, 0}, 0.0, 0.0);
  pf.motion_update(0.0, 0.0, 0.5);  // pure rotation

  double ssum = 0.0, csum = 0.0;
  for (const auto& p : pf.particles()) {
    ssum += std::sin(p.pose.psi);
    csum += std::cos(p.pose.psi);
  }
  const double mean = std::atan2(ssum, csum);
  double var = 0.0;
  for (const auto& p : pf.particles()) {
    const double d = wrap_to_pi(p.pose.psi - mean);
    var += d * d;
  }
  var /= static_cast<double>(cfg.particle_count);
  CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
  CHECK(var == doctest::Approx(cfg.alpha1 * 0.5).epsilon(0.08));
}

TEST_CASE("noise-free scan at the true pose keeps weights uniform") {
  OccupancyGrid g = boxed_grid(64, 0.1);
  RangeLut lut(g);
  ParticleFilterConfig cfg;
  cfg.particle_count = 100;
  ParticleFilter pf(g, lut, cfg, 4);
  pf.initialize(Pose2D{0, 0, 0}, 0.0, 0.0);  // all at the exact pose

  sim::LidarConfig lidar_cfg;
  lidar_cfg.sigma_range = 0.0;
  Rng rng(1);
  const auto scan = sim::simulate_lidar(g, {}, Pose2D{0, 0, 0}, lidar_cfg, rng);
  pf.sensor_update(scan);
  for (const auto& p : pf.particles())
    CHECK(p.weight == doctest::Approx(1.0 / 100.0).epsilon(1e-9));
  const auto est = pf.estimate();
  CHECK(est.x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(est.y == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("single particle at the true pose dominates particles in walls") {
  OccupancyGrid g = boxed_grid(64, 0.1);
  RangeLut lut(g);
  ParticleFilterConfig cfg;
  cfg.particle_count = 1000;
  ParticleFilter pf(g, lut, cfg, 5);
  // 999 particles in hopeless spots (outside the walls), one at the truth.
  pf.initialize(Pose2D{3.05, 3.05, 0.0}, 0.02, 0.01);
  auto& ps = const_cast<std::vector<Particle>&>(pf.particles());
  ps[0].pose = Pose2D{0, 0, 0};

  sim::LidarConfig lidar_cfg;
  lidar_cfg.sigma_range = 0.0;
  Rng rng(1);
  const auto scan = sim::simulate_lidar(g, {}, Pose2D{0, 0, 0}, lidar_cfg, rng);
  pf.sensor_update(scan);
  // After normalization the true-pose particle holds almost all the mass
  // (or resampling already multiplied it).
  const auto est = pf.estimate();
  CHECK(std::hypot(est.x, est.y) < 0.3);
}

TEST_CASE("symmetric square room keeps a bimodal cloud alive") {
  OccupancyGrid g = boxed_grid(64, 0.1);  // square: 4-fold symmetric
  RangeLut lut(g);
  ParticleFilterConfig cfg;
  cfg.particle_count = 1000;
  ParticleFilter pf(g, lut, cfg, 6);
  // Two hypothesis clusters at mirrored poses, both scan-consistent.
  auto& ps = const_cast<std::vector<Particle>&>(pf.particles());
  pf.initialize(Pose2D{1.0, 0.0, 0.0}, 0.05, 0.02);
  for (std::size_t i = 0; i < ps.size() / 2; ++i) {
    ps[i].pose.x = -1.0 + (ps[i].pose.x - 1.0);
    ps[i].pose.psi = wrap_to_pi(ps[i].pose.psi + kPi);
  }

  sim::LidarConfig lidar_cfg;
  lidar_cfg.sigma_range = 0.0;
  Rng rng(2);
  const auto scan = sim::simulate_lidar(g, {}, Pose2D{1.0, 0.0, 0.0}, lidar_cfg, rng);
  for (int step = 0; step < 10; ++step) pf.sensor_update(scan);

  int left = 0, right = 0;
  for (const auto& p : pf.particles()) {
    if (p.pose.x < -0.5) ++left;
    if (p.pose.x > 0.5) ++right;
  }
  CHECK(left > 100);
  CHECK(right > 100);
}

TEST_CASE("aggregate merges pose and velocity sources with frenet output") {
  const Raceline line = make_straight_raceline(10.0, 0.1);
  const FrenetFrame frame(line);
  StateAggregator agg(frame);

  agg.push_pose(Pose2D{3.0, 0.2, 0.0}, 1.0);
  agg.push_velocity(2.0, 0.0, 0.1, 1.0);
  auto est = agg.aggregate(1.0);
  CHECK_FALSE(est.stale);
  CHECK(est.frenet.s == doctest::Approx(3.0));
  CHECK(est.frenet.d == doctest::Approx(0.2));
  CHECK(est.frenet.v_s == doctest::Approx(2.0));
  CHECK(est.frenet.v_d == doctest::Approx(0.0).epsilon(1e-9));

  // 90 degrees off the tangent: v_s ~ 0, v_d ~ +-2.
  agg.push_pose(Pose2D{3.0, 0.2, kPi / 2.0}, 2.0);
  agg.push_velocity(2.0, 0.0, 0.0, 2.0);
  est = agg.aggregate(2.0);
  CHECK(est.frenet.v_s == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(est.frenet.v_d) == doctest::Approx(2.0));

  // Stale source: hold last output and raise the flag.
  est = agg.aggregate(3.0);
  CHECK(est.stale);
  CHECK(est.frenet.s == doctest::Approx(3.0));
}

TEST_SUITE_END();
