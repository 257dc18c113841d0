#include <doctest.h>

#include <cmath>

#include "racestack/planner/centerline.hpp"
#include "racestack/planner/min_curvature.hpp"
#include "racestack/planner/sectors.hpp"
#include "racestack/planner/velocity_profile.hpp"
#include "racestack/track/synth.hpp"

using namespace rs;
using namespace rs::planner;
using namespace rs::track;

namespace {

OccupancyGrid annulus_grid(double r_in, double r_out, double res) {
  OccupancyGrid g;
  g.resolution = res;
  const double extent = r_out + 0.5;
  g.width = g.height = static_cast<int>(std::ceil(2.0 * extent / res));
  g.origin.x = -extent;
  g.origin.y = -extent;
  g.cells.assign(static_cast<std::size_t>(g.width) * g.height, Cell::kUnknown);
  for (int iy = 0; iy < g.height; ++iy)
    for (int ix = 0; ix < g.width; ++ix) {
      double wx, wy;
      g.grid_to_world(ix + 0.5, iy + 0.5, wx, wy);
      const double r = std::hypot(wx, wy);
      if (r > r_in && r < r_out)
        g.set(ix, iy, Cell::kFree);
      else if (r >= r_out - 1e-9 && r < r_out + 0.2)
        g.set(ix, iy, Cell::kOccupied);
      else if (r <= r_in + 1e-9 && r > r_in - 0.2)
        g.set(ix, iy, Cell::kOccupied);
    }
  return g;
}

OccupancyGrid rectangle_ring_grid(double outer_w, double outer_h, double corridor, double res) {
  OccupancyGrid g;
  g.resolution = res;
  g.width = static_cast<int>(std::ceil((outer_w + 1.0) / res));
  g.height = static_cast<int>(std::ceil((outer_h + 1.0) / res));
  g.origin.x = -(outer_w + 1.0) / 2.0;
  g.origin.y = -(outer_h + 1.0) / 2.0;
  g.cells.assign(static_cast<std::size_t>(g.width) * g.height, Cell::kUnknown);
  const double hw = outer_w / 2.0, hh = outer_h / 2.0;
  for (int iy = 0; iy < g.height; ++iy)
    for (int ix = 0; ix < g.width; ++ix) {
      double wx, wy;
      g.grid_to_world(ix + 0.5, iy + 0.5, wx, wy);
      const bool in_outer = std::abs(wx) < hw && std::abs(wy) < hh;
      const bool in_inner = std::abs(wx) < hw - corridor && std::abs(wy) < hh - corridor;
      const bool wall_outer = !in_outer && std::abs(wx) < hw + 0.2 && std::abs(wy) < hh + 0.2;
      const bool wall_inner =
          in_inner && std::abs(wx) > hw - corridor - 0.2 - 1e-9 && std::abs(wy) > -1.0;
      if (in_outer && !in_inner)
        g.set(ix, iy, Cell::kFree);
      else if (wall_outer)
        g.set(ix, iy, Cell::kOccupied);
      else if (in_inner)
        g.set(ix, iy, Cell::kOccupied);
      (void)wall_inner;
    }
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("planner");

TEST_CASE("annulus centerline has the analytic radius and widths") {
  const double res = 0.05;
  const OccupancyGrid g = annulus_grid(4.0, 6.0, res);
  const Centerline c = extract_centerline(g);
  REQUIRE(c.size() > 100);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = std::hypot(c.x[i], c.y[i]);
    CHECK(r == doctest::Approx(5.0).epsilon(2.0 * res / 5.0));
    CHECK(c.w_left[i] == doctest::Approx(1.0).epsilon(2.0 * res));
    CHECK(c.w_right[i] == doctest::Approx(1.0).epsilon(2.0 * res));
  }
}

TEST_CASE("rectangular ring centerline widths match half the corridor") {
  const double res = 0.05;
  const OccupancyGrid g = rectangle_ring_grid(10.0, 6.0, 2.0, res);
  const Centerline c = extract_centerline(g);
  REQUIRE(c.size() > 50);
  // On straight stretches (away from corners) widths are half the corridor.
  int checked = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool on_bottom = std::abs(c.y[i] + 2.0) < 0.25 && std::abs(c.x[i]) < 2.0;
    if (!on_bottom) continue;
    ++checked;
    CHECK(c.w_left[i] == doctest::Approx(1.0).epsilon(0.12));
    CHECK(c.w_right[i] == doctest::Approx(1.0).epsilon(0.12));
  }
  CHECK(checked > 3);
}

TEST_CASE("detached noise blob is removed by opening and component filtering") {
  OccupancyGrid g = annulus_grid(4.0, 6.0, 0.05);
  // Free-space speckle outside the track.
  for (int dy = 0; dy < 3; ++dy)
    for (int dx = 0; dx < 3; ++dx) g.set(5 + dx, 5 + dy, Cell::kFree);
  const Centerline c = extract_centerline(g);
  for (std::size_t i = 0; i < c.size(); ++i)
    CHECK(std::hypot(c.x[i], c.y[i]) == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("straight corridor stays straight under optimization") {
  // Long stadium: in the middle of the straights, far away from the corner
  // arcs, the minimum-curvature line is the straight line (alpha ~ 0).
  const Raceline oval = make_oval_raceline(16.0, 2.0, 0.2, 2.0, 1.2);
  Centerline c;
  c.x = oval.x;
  c.y = oval.y;
  c.w_left.assign(oval.size(), 1.2);
  c.w_right.assign(oval.size(), 1.2);
  PlannerParams params;
  params.stepsize_reg = 0.2;
  const MinCurvatureResult res = min_curvature_qp(c, params);
  REQUIRE(res.raceline.size() > 100);
  int checked = 0;
  for (std::size_t i = 0; i < res.raceline.size(); ++i) {
    if (std::abs(res.raceline.x[i]) < 4.0 && std::abs(res.raceline.y[i]) > 1.0) {
      CHECK(std::abs(res.raceline.kappa[i]) < 0.05);
      ++checked;
    }
  }
  CHECK(checked > 20);
}

TEST_CASE("annulus optimum is the outermost circle") {
  // Corridor 4..6 with width_opt 0.8: the lowest-curvature line is the
  // largest constant-radius circle, R = 6 - 0.4 = 5.6, kappa = 1/5.6.
  // With the spec default width_opt=0.8 and half-widths 1.0 the usable
  // half-width is 0.6, hence R = 5.0 + 0.6 = 5.6.
  const OccupancyGrid g = annulus_grid(4.0, 6.0, 0.05);
  const Centerline c = extract_centerline(g);
  PlannerParams params;
  const MinCurvatureResult res = min_curvature_qp(c, params);

  const double r_expect = 5.0 + (1.0 - params.width_opt / 2.0);
  for (std::size_t i = 0; i < res.raceline.size(); i += 5) {
    const double r = std::hypot(res.raceline.x[i], res.raceline.y[i]);
    CHECK(r == doctest::Approx(r_expect).epsilon(0.03));
  }
  double kappa_mean = 0.0;
  for (double k : res.raceline.kappa) kappa_mean += std::abs(k);
  kappa_mean /= static_cast<double>(res.raceline.size());
  CHECK(kappa_mean == doctest::Approx(1.0 / r_expect).epsilon(0.03));
  CHECK(res.max_kappa <= params.curvlim + params.iqp_curverror_allowed);
}

TEST_CASE("optimizer never exceeds the seed's squared-curvature sum") {
  const OccupancyGrid g = rectangle_ring_grid(10.0, 6.0, 2.4, 0.05);
  const Centerline c = extract_centerline(g);
  PlannerParams params;
  const MinCurvatureResult res = min_curvature_qp(c, params);

  // Seed curvature from the centerline itself (Menger on the polyline).
  auto sum_k2 = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t p = (i + n - 1) % n, q = (i + 1) % n;
      const double area2 = (xs[i] - xs[p]) * (ys[q] - ys[p]) - (ys[i] - ys[p]) * (xs[q] - xs[p]);
      const double la = std::hypot(xs[i] - xs[p], ys[i] - ys[p]);
      const double lb = std::hypot(xs[q] - xs[i], ys[q] - ys[i]);
      const double lc = std::hypot(xs[q] - xs[p], ys[q] - ys[p]);
      const double k = la * lb * lc > 1e-12 ? 2.0 * area2 / (la * lb * lc) : 0.0;
      acc += k * k;
    }
    return acc;
  };
  // Compare per-meter averages: both paths are resampled at different steps.
  const double seed = sum_k2(c.x, c.y) / static_cast<double>(c.size());
  const double opt = sum_k2(res.raceline.x, res.raceline.y) /
                     static_cast<double>(res.raceline.size());
  CHECK(opt <= seed + 1e-9);
}

TEST_CASE("infeasible corridor reports the offending range") {
  const OccupancyGrid g = annulus_grid(4.0, 6.0, 0.05);
  Centerline c = extract_centerline(g);
  c.w_left[10] = 0.1;
  c.w_right[10] = 0.1;
  PlannerParams params;
  CHECK_THROWS_AS(min_curvature_qp(c, params), InfeasibleCorridorError);
}

TEST_CASE("velocity profile hits the lateral limit exactly on constant curvature") {
  PlannerParams params;
  params.a_lat_max = 8.0;
  params.v_max = 10.0;
  const std::vector<double> kappa(200, 0.5);
  const auto v = velocity_profile(kappa, 0.1, params);
  for (double vi : v) CHECK(vi == doctest::Approx(4.0));  // sqrt(8 / 0.5)
}

TEST_CASE("zero curvature gives v_max everywhere") {
  PlannerParams params;
  const std::vector<double> kappa(100, 0.0);
  const auto v = velocity_profile(kappa, 0.1, params);
  for (double vi : v) CHECK(vi == doctest::Approx(params.v_max));
}

TEST_CASE("hairpin after straight brakes monotonically into the apex") {
  PlannerParams params;
  params.a_lat_max = 6.0;
  params.a_long_max = 4.0;
  params.v_max = 8.0;
  // Straight, hairpin (kappa = 1), straight again; closed loop.
  std::vector<double> kappa(400, 0.0);
  for (int i = 180; i < 220; ++i) kappa[i] = 1.0;
  const double step = 0.1;
  const auto v = velocity_profile(kappa, step, params);

  // Friction circle holds pointwise.
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(v[i] * v[i] * std::abs(kappa[i]) <= params.a_lat_max * (1.0 + 1e-9));

  // Longitudinal acceleration legality: |dv^2/ds| / 2 <= a_long_max.
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double a = (v[i + 1] * v[i + 1] - v[i] * v[i]) / (2.0 * step);
    CHECK(std::abs(a) <= params.a_long_max + 1e-6);
  }

  // Monotone braking into the apex.
  for (int i = 120; i < 180; ++i) CHECK(v[i + 1] <= v[i] + 1e-9);
}

TEST_CASE("sector scaling identities and blending") {
  Raceline line = make_circle_raceline(5.0, 0.1, 4.0);

  SectorConfig ones = SectorConfig::uniform(line.s_max, 4, 1.0);
  const Raceline same = apply_sectors(line, ones);
  for (std::size_t i = 0; i < line.size(); ++i) CHECK(same.v[i] == doctest::Approx(line.v[i]));

  SectorConfig halves = SectorConfig::uniform(line.s_max, 4, 0.5);
  const Raceline halved = apply_sectors(line, halves);
  for (std::size_t i = 0; i < line.size(); ++i)
    CHECK(halved.v[i] == doctest::Approx(0.5 * line.v[i]));

  // Two sectors 0.8 / 1.0 with a junction at s = 10: linear blend across 1 m.
  SectorConfig two;
  two.boundaries = {0.0, 10.0};
  two.scalers = {0.8, 1.0};
  CHECK(sector_scaler_at(two, 9.5, line.s_max) == doctest::Approx(0.8));
  CHECK(sector_scaler_at(two, 10.5, line.s_max) == doctest::Approx(1.0));
  CHECK(sector_scaler_at(two, 10.0, line.s_max) == doctest::Approx(0.9));
}

TEST_CASE("raising one scaler never lowers velocity anywhere") {
  Raceline line = make_circle_raceline(5.0, 0.1, 4.0);
  SectorConfig base = SectorConfig::uniform(line.s_max, 5, 0.6);
  const Raceline v0 = apply_sectors(line, base);
  for (std::size_t sector = 0; sector < 5; ++sector) {
    SectorConfig raised = base;
    raised.scalers[sector] = 0.9;
    const Raceline v1 = apply_sectors(line, raised);
    for (std::size_t i = 0; i < line.size(); ++i) CHECK(v1.v[i] >= v0.v[i] - 1e-12);
  }
}

TEST_CASE("sectors shorter than twice the blend window are rejected") {
  Raceline line = make_circle_raceline(5.0, 0.1, 4.0);
  SectorConfig bad;
  bad.boundaries = {0.0, 1.0, 10.0};  // middle sector is 1.0 m < 2 m
  bad.scalers = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(apply_sectors(line, bad), PlannerError);
}

TEST_SUITE_END();
