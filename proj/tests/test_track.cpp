#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "racestack/common/rng.hpp"
#include "racestack/track/frenet.hpp"
#include "racestack/track/map_io.hpp"
#include "racestack/track/raceline_io.hpp"
#include "racestack/track/synth.hpp"

using namespace rs;
using namespace rs::track;

namespace {

// Brute-force nearest-waypoint oracle, kept independent of the spatial hash.
int nearest_brute(const Raceline& line, double x, double y) {
  int best = -1;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(line.size()); ++i) {
    const double dx = x - line.x[i];
    const double dy = y - line.y[i];
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("track");

TEST_CASE("wrap_s basic values") {
  CHECK(wrap_s(3.0, 10.0) == doctest::Approx(3.0));
  CHECK(wrap_s(-1.0, 10.0) == doctest::Approx(9.0));
  CHECK(wrap_s(10.0, 10.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(wrap_s(1.0, 0.0), TrackError);
  CHECK_THROWS_AS(wrap_s(1.0, -2.0), TrackError);
}

TEST_CASE("wrap_s is idempotent and periodic") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double s_max = rng.uniform(0.1, 100.0);
    const double s = rng.uniform(-500.0, 500.0);
    const double w = wrap_s(s, s_max);
    CHECK(w >= 0.0);
    CHECK(w < s_max);
    CHECK(wrap_s(w, s_max) == doctest::Approx(w).epsilon(1e-12));
    CHECK(wrap_s(s + s_max, s_max) == doctest::Approx(w).epsilon(1e-9));
  }
}

TEST_CASE("cartesian_to_frenet identity on straight track") {
  const Raceline line = make_straight_raceline(10.0, 0.1);
  const FrenetFrame frame(line);

  const auto fp = frame.cartesian_to_frenet(2.53, 0.30);
  REQUIRE(fp.has_value());
  CHECK(fp->s == doctest::Approx(2.53).epsilon(1e-9));
  CHECK(fp->d == doctest::Approx(0.30).epsilon(1e-9));

  // A raceline point maps to (s[k], 0).
  const auto on_line = frame.cartesian_to_frenet(line.x[17], line.y[17]);
  REQUIRE(on_line.has_value());
  CHECK(on_line->s == doctest::Approx(line.s[17]).epsilon(1e-12));
  CHECK(on_line->d == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frenet_to_cartesian identity on straight track") {
  const Raceline line = make_straight_raceline(10.0, 0.1);
  const FrenetFrame frame(line);
  double x, y;
  frame.frenet_to_cartesian(2.53, 0.30, x, y);
  CHECK(x == doctest::Approx(2.53).epsilon(1e-9));
  CHECK(y == doctest::Approx(0.30).epsilon(1e-9));

  frame.frenet_to_cartesian(line.s[31], 0.0, x, y);
  CHECK(x == doctest::Approx(line.x[31]).epsilon(1e-12));
  CHECK(y == doctest::Approx(line.y[31]).epsilon(1e-12));
}

TEST_CASE("circle conversion stays within the analytic s-error bound") {
  // Unit circle, 0.1 m step: per-segment s error is bounded by
  // |R*atan(dx/R) - dx| = 3.3e-4 m at dx = 0.1.
  const Raceline line = make_circle_raceline(1.0, 0.1);
  const FrenetFrame frame(line);
  double worst = 0.0;
  const int samples = 5000;
  for (int i = 0; i < samples; ++i) {
    const double s_true = line.s_max * static_cast<double>(i) / samples;
    const double theta = s_true / 1.0;
    const auto fp = frame.cartesian_to_frenet(std::cos(theta), std::sin(theta));
    REQUIRE(fp.has_value());
    double err = std::abs(cyclic_diff(fp->s, s_true, line.s_max));
    worst = std::max(worst, err);
    CHECK(std::abs(fp->d) < 2e-3);
  }
  CHECK(worst <= 3.3e-4);
}

TEST_CASE("round trip f2c(c2f(p)) on a smooth oval") {
  const Raceline line = make_oval_raceline(6.0, 2.0, 0.1);
  const FrenetFrame frame(line);
  Rng rng(11);
  double worst = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const double s = rng.uniform(0.0, line.s_max);
    const double d = rng.uniform(-0.5, 0.5);
    double x, y;
    frame.frenet_to_cartesian(s, d, x, y);
    const auto fp = frame.cartesian_to_frenet(x, y);
    REQUIRE(fp.has_value());
    double x2, y2;
    frame.frenet_to_cartesian(fp->s, fp->d, x2, y2);
    worst = std::max(worst, std::hypot(x2 - x, y2 - y));
  }
  // Conservative bound 2*step^2 / R_min with step 0.1, R_min 2.
  CHECK(worst < 2.0 * 0.1 * 0.1 / 2.0);
}

TEST_CASE("round trip on straight segments is exact to 1e-6") {
  const Raceline line = make_straight_raceline(20.0, 0.1);
  const FrenetFrame frame(line);
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(0.5, 19.5);
    const double y = rng.uniform(-0.5, 0.5);
    const auto fp = frame.cartesian_to_frenet(x, y);
    REQUIRE(fp.has_value());
    double x2, y2;
    frame.frenet_to_cartesian(fp->s, fp->d, x2, y2);
    CHECK(std::hypot(x2 - x, y2 - y) < 1e-6);
  }
}

TEST_CASE("spatial hash matches brute-force argmin") {
  const Raceline line = make_oval_raceline(5.0, 1.5, 0.1);
  const FrenetFrame frame(line);
  Rng rng(17);
  for (int i = 0; i < 5000; ++i) {
    const double x = rng.uniform(-6.0, 6.0);
    const double y = rng.uniform(-4.0, 4.0);
    CHECK(frame.nearest_waypoint(x, y) == nearest_brute(line, x, y));
  }
}

TEST_CASE("argmin is stable under small perturbations of off-line points") {
  const Raceline line = make_oval_raceline(5.0, 1.5, 0.1);
  const FrenetFrame frame(line);
  Rng rng(19);
  for (int i = 0; i < 1000; ++i) {
    const double s = rng.uniform(0.0, line.s_max);
    const double d = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.15, 0.6);
    double x, y;
    frame.frenet_to_cartesian(s, d, x, y);
    const auto fp = frame.cartesian_to_frenet(x, y);
    REQUIRE(fp.has_value());
    for (int j = 0; j < 8; ++j) {
      const double eps = line.step / 10.0;
      const auto fp2 = frame.cartesian_to_frenet(x + rng.uniform(-eps, eps) * 0.5,
                                                 y + rng.uniform(-eps, eps) * 0.5);
      REQUIRE(fp2.has_value());
      CHECK(fp->d * fp2->d > 0.0);  // d never flips sign when |d| > step
    }
  }
}

TEST_CASE("out-of-corridor points are rejected unless forced") {
  const Raceline line = make_circle_raceline(3.0, 0.1);
  const FrenetFrame frame(line, 5.0);
  const auto rejected = frame.cartesian_to_frenet(3.0 + 8.5, 0.0);
  CHECK_FALSE(rejected.has_value());
  // Radially outside a counter-clockwise circle lies to the right: d < 0.
  const auto forced = frame.cartesian_to_frenet(3.0 + 8.5, 0.0, /*force=*/true);
  REQUIRE(forced.has_value());
  CHECK(forced->d == doctest::Approx(-8.5).epsilon(1e-6));
}

TEST_CASE("boundary_distance interpolates per-point widths") {
  Raceline line = make_straight_raceline(10.0, 0.1);
  line.d_left[10] = 1.0;
  line.d_left[11] = 2.0;
  const FrenetFrame frame(line);
  CHECK(frame.boundary_distance(line.s[10], Side::kLeft) == doctest::Approx(1.0));
  CHECK(frame.boundary_distance(line.s[10] + 0.05, Side::kLeft) == doctest::Approx(1.5));

  // Annulus of constant half-width w reports w everywhere.
  const Raceline ring = make_circle_raceline(5.0, 0.1, 2.0, /*halfwidth=*/0.75);
  const FrenetFrame ring_frame(ring);
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const double s = rng.uniform(0.0, ring.s_max);
    CHECK(ring_frame.boundary_distance(s, Side::kLeft) == doctest::Approx(0.75));
    CHECK(ring_frame.boundary_distance(s, Side::kRight) == doctest::Approx(0.75));
  }
}

TEST_CASE("pose_to_frenet rotates body velocity into the frenet frame") {
  const Raceline line = make_straight_raceline(10.0, 0.1);
  const FrenetFrame frame(line);

  Pose2D aligned{3.0, 0.0, 0.0};
  auto fp = frame.pose_to_frenet(aligned, 2.0, 0.0);
  REQUIRE(fp.has_value());
  CHECK(fp->v_s == doctest::Approx(2.0));
  CHECK(fp->v_d == doctest::Approx(0.0));

  Pose2D crosswise{3.0, 0.0, kPi / 2.0};
  fp = frame.pose_to_frenet(crosswise, 2.0, 0.0);
  REQUIRE(fp.has_value());
  CHECK(fp->v_s == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(fp->v_d) == doctest::Approx(2.0));
}

TEST_CASE("map save/load round trip preserves cells and metadata") {
  std::vector<double> xs, ys;
  oval_centerline(4.0, 1.5, 0.05, xs, ys);
  const OccupancyGrid grid = render_corridor_grid(xs, ys, 1.0, 0.05);

  const auto dir = std::filesystem::temp_directory_path() / "rs_map_io_test";
  std::filesystem::create_directories(dir);
  const auto yaml = (dir / "map.yaml").string();
  const auto pgm = (dir / "map.pgm").string();
  save_map(grid, yaml, pgm);
  const OccupancyGrid loaded = load_map(yaml);

  REQUIRE(loaded.width == grid.width);
  REQUIRE(loaded.height == grid.height);
  CHECK(loaded.resolution == doctest::Approx(grid.resolution));
  CHECK(loaded.origin.x == doctest::Approx(grid.origin.x));
  CHECK(loaded.origin.y == doctest::Approx(grid.origin.y));
  int mismatches = 0;
  for (std::size_t i = 0; i < grid.cells.size(); ++i)
    if (grid.cells[i] != loaded.cells[i]) ++mismatches;
  CHECK(mismatches == 0);
}

TEST_CASE("raceline csv round trip") {
  const Raceline line = make_oval_raceline(6.0, 2.0, 0.1, 3.0, 0.8);
  const auto dir = std::filesystem::temp_directory_path() / "rs_raceline_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "raceline.csv").string();
  save_raceline_csv(line, path);
  const Raceline loaded = load_raceline_csv(path);
  REQUIRE(loaded.size() == line.size());
  CHECK(loaded.s_max == doctest::Approx(line.s_max).epsilon(1e-12));
  for (std::size_t i = 0; i < line.size(); i += 7) {
    CHECK(loaded.x[i] == doctest::Approx(line.x[i]).epsilon(1e-14));
    CHECK(loaded.y[i] == doctest::Approx(line.y[i]).epsilon(1e-14));
    CHECK(loaded.psi[i] == doctest::Approx(line.psi[i]).epsilon(1e-14));
    CHECK(loaded.v[i] == doctest::Approx(line.v[i]).epsilon(1e-14));
  }
}

TEST_SUITE_END();
