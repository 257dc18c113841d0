#include <doctest.h>

#include <cmath>

#include "racestack/opponent/detection.hpp"
#include "racestack/opponent/tracker.hpp"
#include "racestack/track/synth.hpp"

using namespace rs;
using namespace rs::opponent;
using namespace rs::track;

namespace {

sim::LaserScan blank_scan(std::size_t beams = 1081) {
  sim::LaserScan scan;
  scan.increment = (scan.angle_max - scan.angle_min) / static_cast<double>(beams - 1);
  scan.ranges.assign(beams, scan.range_max);
  return scan;
}

// Paints an axis-aligned segment (x = const face) into the scan as seen from
// the origin looking along +x.
void paint_face(sim::LaserScan& scan, double face_x, double y_lo, double y_hi) {
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double a = scan.beam_angle(i);
    if (std::abs(a) >= kPi / 2.0 - 1e-6) continue;
    const double r = face_x / std::cos(a);
    const double y = r * std::sin(a);
    if (y >= y_lo && y <= y_hi && r < scan.ranges[i]) scan.ranges[i] = r;
  }
}

// Brute-force minimal-area rectangle over a fine angle sweep (the oracle).
double brute_force_min_area_angle(const PointCloud2D& cloud, double& best_area) {
  best_area = 1e300;
  double best_angle = 0.0;
  for (double deg = 0.0; deg < 90.0; deg += 0.5) {
    const double a = deg2rad(deg);
    const double c = std::cos(a), s = std::sin(a);
    double min_u = 1e300, max_u = -1e300, min_v = 1e300, max_v = -1e300;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double u = c * cloud.x[i] + s * cloud.y[i];
      const double v = -s * cloud.x[i] + c * cloud.y[i];
      min_u = std::min(min_u, u);
      max_u = std::max(max_u, u);
      min_v = std::min(min_v, v);
      max_v = std::max(max_v, v);
    }
    const double area = (max_u - min_u) * (max_v - min_v);
    if (area < best_area) {
      best_area = area;
      best_angle = a;
    }
  }
  return best_angle;
}

}  // namespace

TEST_SUITE_BEGIN("opponent");

TEST_CASE("two separated boxes produce exactly two clusters") {
  sim::LaserScan scan = blank_scan();
  paint_face(scan, 2.0, -0.8, -0.3);
  paint_face(scan, 2.0, 0.3, 0.8);
  DetectionParams params;
  const auto clusters = segment_scan(scan, Pose2D{0, 0, 0}, params);
  CHECK(clusters.size() == 2);
}

TEST_CASE("empty scan yields no clusters") {
  const sim::LaserScan scan = blank_scan();
  DetectionParams params;
  CHECK(segment_scan(scan, Pose2D{0, 0, 0}, params).empty());
}

TEST_CASE("continuous wall yields one cluster") {
  sim::LaserScan scan = blank_scan();
  paint_face(scan, 3.0, -2.5, 2.5);
  DetectionParams params;
  const auto clusters = segment_scan(scan, Pose2D{0, 0, 0}, params);
  CHECK(clusters.size() == 1);
}

TEST_CASE("clusters beyond max viewing distance are dropped") {
  sim::LaserScan scan = blank_scan();
  paint_face(scan, 9.5, -0.4, 0.4);
  DetectionParams params;  // max_viewing_distance 9
  CHECK(segment_scan(scan, Pose2D{0, 0, 0}, params).empty());
}

TEST_CASE("filter_clusters applies boundary, count, and size predicates") {
  const Raceline line = make_straight_raceline(20.0, 0.1, 2.0, /*halfwidth=*/1.0);
  const FrenetFrame frame(line);
  DetectionParams params;
  params.boundary_inflation = 0.2;

  auto make_cluster = [](double cx, double cy, std::size_t n, double extent) {
    PointCloud2D c;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
      c.x.push_back(cx + (t - 0.5) * extent);
      c.y.push_back(cy);
    }
    return c;
  };

  // On the boundary wall: removed.
  const auto on_wall = make_cluster(5.0, 1.0, 60, 0.3);
  // Speckle mid-track: removed (10 < min_obs_size 40).
  const auto speckle = make_cluster(5.0, 0.0, 10, 0.3);
  // Car-like mid-track: kept.
  const auto car = make_cluster(5.0, 0.1, 60, 0.3);

  const auto kept = filter_clusters({on_wall, speckle, car}, frame, params);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].size() == 60);
}

TEST_CASE("rectangle fit matches the brute-force angle sweep") {
  const Raceline line = make_straight_raceline(20.0, 0.1);
  const FrenetFrame frame(line);

  // Axis-aligned 0.5 x 0.3 point grid.
  PointCloud2D grid_cloud;
  for (int ix = 0; ix <= 10; ++ix)
    for (int iy = 0; iy <= 6; ++iy) {
      grid_cloud.x.push_back(3.0 + 0.05 * ix);
      grid_cloud.y.push_back(0.1 + 0.05 * iy);
    }
  const Obstacle obs = fit_rectangle(grid_cloud, frame);
  CHECK(obs.size == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(obs.size_minor == doctest::Approx(0.3).epsilon(1e-9));
  const double yaw_mod = std::abs(std::fmod(obs.yaw, kPi / 2.0));
  CHECK((yaw_mod < 1e-6 || yaw_mod > kPi / 2.0 - 1e-6));

  double brute_area = 0.0;
  brute_force_min_area_angle(grid_cloud, brute_area);
  CHECK(obs.size * obs.size_minor <= brute_area + 1e-9);

  // Single-file line of points: yaw along the line, zero minor extent.
  PointCloud2D strip;
  for (int i = 0; i <= 20; ++i) {
    strip.x.push_back(2.0 + 0.02 * i);
    strip.y.push_back(0.5 + 0.02 * i);
  }
  const Obstacle line_obs = fit_rectangle(strip, frame);
  CHECK(std::abs(wrap_to_pi(line_obs.yaw - kPi / 4.0)) < 1e-6);
  CHECK(line_obs.size_minor == doctest::Approx(0.0).epsilon(1e-12));

  // L-shaped two-face return: center inside the L bounding box, both faces
  // covered, never worse than the sweep oracle.
  PointCloud2D ell;
  for (int i = 0; i <= 25; ++i) {
    ell.x.push_back(4.0 + 0.02 * i);
    ell.y.push_back(0.0);
  }
  for (int i = 0; i <= 15; ++i) {
    ell.x.push_back(4.0);
    ell.y.push_back(0.02 * i);
  }
  const Obstacle ell_obs = fit_rectangle(ell, frame);
  CHECK(ell_obs.x_center > 4.0);
  CHECK(ell_obs.x_center < 4.5);
  CHECK(ell_obs.y_center > 0.0);
  CHECK(ell_obs.y_center < 0.3);
  double ell_brute_area = 0.0;
  brute_force_min_area_angle(ell, ell_brute_area);
  CHECK(ell_obs.size * ell_obs.size_minor <= ell_brute_area + 1e-9);
}

TEST_CASE("prediction follows the constant-velocity row in los") {
  const Raceline line = make_circle_raceline(5.0, 0.1, 2.0);
  const FrenetFrame frame(line);
  TrackerParams params;
  OpponentTracker tracker(frame, params);

  Obstacle det;
  det.s_center = 0.0;
  det.d_center = 0.0;
  tracker.update({det}, 0.0);
  // Force the velocity state to 1 m/s.
  auto& est = const_cast<OpponentEstimate&>(tracker.estimate());
  est.x << 0.0, 1.0, 0.0, 0.0;

  tracker.predict(0.1, /*in_los=*/true);
  CHECK(tracker.estimate().s() == doctest::Approx(0.1));
  CHECK(tracker.estimate().v_s() == doctest::Approx(1.0));  // u contributes nothing
}

TEST_CASE("non-los input drives v_s toward the raceline target") {
  const Raceline line = make_circle_raceline(5.0, 0.1, /*v=*/10.0 / 3.0);
  const FrenetFrame frame(line);
  TrackerParams params;  // ratio 0.6 -> v_target = 2.0
  OpponentTracker tracker(frame, params);

  Obstacle det;
  det.s_center = 0.0;
  tracker.update({det}, 0.0);
  auto& est = const_cast<OpponentEstimate&>(tracker.estimate());
  est.x << 0.0, 1.0, 0.0, 0.0;

  // Hand evaluation: v_s+ = v_s + P_vs * (2 - 1) = 1.2.
  tracker.predict(0.1, /*in_los=*/false);
  CHECK(tracker.estimate().v_s() == doctest::Approx(1.2));

  // The input is a contraction toward the target: monotone convergence.
  double prev_err = std::abs(tracker.estimate().v_s() - 2.0);
  for (int i = 0; i < 40; ++i) {
    tracker.predict(0.1, false);
    const double err = std::abs(tracker.estimate().v_s() - 2.0);
    CHECK(err <= prev_err + 1e-12);
    prev_err = err;
  }
  CHECK(prev_err < 0.01);
}

TEST_CASE("cyclic s residual wraps near the seam") {
  const Raceline line = make_circle_raceline(5.0, 0.1, 2.0);  // s_max ~ 31.4
  const FrenetFrame frame(line);
  const double s_max = frame.s_max();
  TrackerParams params;
  OpponentTracker tracker(frame, params);

  Obstacle det;
  det.s_center = s_max - 0.05;
  tracker.update({det}, 0.0);
  auto& est = const_cast<OpponentEstimate&>(tracker.estimate());
  est.x << s_max - 0.05, 1.0, 0.0, 0.0;

  tracker.predict(0.1, true);
  CHECK(tracker.estimate().s() == doctest::Approx(0.05).epsilon(1e-9));

  // Residual vs a measurement at 0.06 is +0.01, not -s_max + 0.01.
  CHECK(track::cyclic_diff(0.06, tracker.estimate().s(), s_max) ==
        doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("d and v_d decay to zero under both input modes") {
  const Raceline line = make_circle_raceline(5.0, 0.1, 2.0);
  const FrenetFrame frame(line);
  TrackerParams params;
  for (bool los : {true, false}) {
    OpponentTracker tracker(frame, params);
    Obstacle det;
    det.s_center = 1.0;
    det.d_center = 0.4;
    tracker.update({det}, 0.0);
    auto& est = const_cast<OpponentEstimate&>(tracker.estimate());
    est.x << 1.0, 0.0, 0.4, 0.2;
    double prev_d = 0.4, prev_vd = 0.2;
    for (int i = 0; i < 400; ++i) {
      tracker.predict(0.025, los);
      CHECK(std::abs(tracker.estimate().d()) <= prev_d + 1e-12);
      prev_d = std::abs(tracker.estimate().d());
      prev_vd = std::abs(tracker.estimate().v_d());
    }
    CHECK(prev_d < 0.05);
    CHECK(prev_vd < 0.05);
  }
}

TEST_CASE("tracker covariance stays symmetric psd with random los toggling") {
  const Raceline line = make_circle_raceline(5.0, 0.1, 2.0);
  const FrenetFrame frame(line);
  TrackerParams params;
  OpponentTracker tracker(frame, params);
  Rng rng(31);

  Obstacle det;
  det.s_center = 0.0;
  tracker.update({det}, 0.0);

  double truth_s = 0.0;
  double stamp = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double dt = 0.025;
    stamp += dt;
    truth_s = wrap_s(truth_s + 1.5 * dt, frame.s_max());
    tracker.predict(dt, rng.uniform() < 0.7);
    if (rng.uniform() < 0.8) {
      Obstacle d2;
      d2.s_center = wrap_s(truth_s + rng.gaussian(0.0, 0.05), frame.s_max());
      d2.d_center = rng.gaussian(0.0, 0.05);
      tracker.update({d2}, stamp);
    }
    if (i % 2500 == 0) {
      const auto& p = tracker.estimate().P;
      CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-9);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(p);
      CHECK(eig.eigenvalues().minCoeff() > -1e-12);
    }
  }
}

TEST_CASE("line of sight: clear corridor, blocked corner, and range cap") {
  OccupancyGrid g;
  g.resolution = 0.1;
  g.width = g.height = 200;
  g.origin.x = -10.0;
  g.origin.y = -10.0;
  g.cells.assign(200 * 200, Cell::kFree);

  CHECK(line_of_sight(Pose2D{0, 0, 0}, 3.0, 0.0, g, 9.0));
  CHECK_FALSE(line_of_sight(Pose2D{0, 0, 0}, 9.5, 0.0, g, 9.0));

  // Wall segment between ego and the opponent around a corner.
  for (int iy = 80; iy < 120; ++iy) g.set(120, iy, Cell::kOccupied);
  CHECK_FALSE(line_of_sight(Pose2D{0, 0, 0}, 4.0, 0.0, g, 9.0));
  CHECK(line_of_sight(Pose2D{0, 0, 0}, 0.0, 4.0, g, 9.0));
}

TEST_CASE("static vs dynamic vote follows positional scatter") {
  const Raceline line = make_circle_raceline(5.0, 0.1, 2.0);
  const FrenetFrame frame(line);
  TrackerParams params;

  // Static target: detections scattered well below sigma_static.
  OpponentTracker still(frame, params);
  Rng rng(7);
  double stamp = 0.0;
  for (int i = 0; i < 20; ++i) {
    stamp += 0.025;
    Obstacle det;
    det.s_center = wrap_s(2.0 + rng.gaussian(0.0, 0.01), frame.s_max());
    det.d_center = rng.gaussian(0.0, 0.01);
    still.predict(0.025, true);
    still.update({det}, stamp);
  }
  CHECK(still.estimate().is_static);

  // Moving target: progresses 5 cm per update.
  OpponentTracker moving(frame, params);
  stamp = 0.0;
  double s = 0.0;
  for (int i = 0; i < 20; ++i) {
    stamp += 0.025;
    s = wrap_s(s + 0.05, frame.s_max());
    Obstacle det;
    det.s_center = s;
    moving.predict(0.025, true);
    moving.update({det}, stamp);
  }
  CHECK_FALSE(moving.estimate().is_static);
}

TEST_CASE("unassociated detections seed the static list") {
  const Raceline line = make_circle_raceline(5.0, 0.1, 2.0);
  const FrenetFrame frame(line);
  TrackerParams params;
  OpponentTracker tracker(frame, params);

  Obstacle opp;
  opp.s_center = 1.0;
  tracker.update({opp}, 0.0);

  Obstacle far_away;
  far_away.s_center = 15.0;
  far_away.d_center = 0.3;
  tracker.predict(0.025, true);
  tracker.update({opp, far_away}, 0.025);
  REQUIRE(tracker.static_obstacles().size() >= 1);
  CHECK(tracker.static_obstacles().back().s == doctest::Approx(15.0).epsilon(1e-6));
}

TEST_SUITE_END();
