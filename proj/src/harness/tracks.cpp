#include "racestack/harness/tracks.hpp"

#include <cmath>
#include <filesystem>

#include "racestack/planner/centerline.hpp"
#include "racestack/planner/velocity_profile.hpp"
#include "racestack/track/map_io.hpp"
#include "racestack/track/raceline_io.hpp"
#include "racestack/track/synth.hpp"

namespace rs::harness {
namespace {

namespace fs = std::filesystem;

}  // namespace

void rounded_polygon_centerline(const std::vector<std::pair<double, double>>& vertices,
                                double corner_radius, double ds, std::vector<double>& xs,
                                std::vector<double>& ys) {
  xs.clear();
  ys.clear();
  const std::size_t n = vertices.size();
  if (n < 3) throw track::TrackError("rounded_polygon_centerline: need 3+ vertices");

  // Corner tangent points and arcs.
  struct Corner {
    double entry_x, entry_y, exit_x, exit_y;
    double cx, cy, a_begin, a_sweep;
  };
  std::vector<Corner> corners(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = vertices[(i + n - 1) % n];
    const auto& v = vertices[i];
    const auto& next = vertices[(i + 1) % n];
    double ux = v.first - prev.first, uy = v.second - prev.second;
    double wx = next.first - v.first, wy = next.second - v.second;
    const double lu = std::hypot(ux, uy), lw = std::hypot(wx, wy);
    ux /= lu;
    uy /= lu;
    wx /= lw;
    wy /= lw;
    const double cross = ux * wy - uy * wx;
    const double dot = std::clamp(ux * wx + uy * wy, -1.0, 1.0);
    const double turn = std::atan2(cross, dot);
    const double t = std::abs(turn) < 1e-9 ? 0.0 : corner_radius * std::tan(std::abs(turn) / 2.0);
    if (t > 0.45 * std::min(lu, lw))
      throw track::TrackError("rounded_polygon_centerline: corner radius too large");

    Corner c;
    c.entry_x = v.first - ux * t;
    c.entry_y = v.second - uy * t;
    c.exit_x = v.first + wx * t;
    c.exit_y = v.second + wy * t;
    // Arc center sits along the turn-side normal of the entry tangent.
    const double side = turn >= 0.0 ? 1.0 : -1.0;
    c.cx = c.entry_x + (-uy) * side * corner_radius;
    c.cy = c.entry_y + (ux)*side * corner_radius;
    c.a_begin = std::atan2(c.entry_y - c.cy, c.entry_x - c.cx);
    c.a_sweep = turn;
    corners[i] = c;
  }

  auto push_line = [&](double x0, double y0, double x1, double y1) {
    const double len = std::hypot(x1 - x0, y1 - y0);
    const int steps = std::max(1, static_cast<int>(std::floor(len / ds)));
    for (int k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      xs.push_back(x0 + t * (x1 - x0));
      ys.push_back(y0 + t * (y1 - y0));
    }
  };
  auto push_arc = [&](const Corner& c) {
    const double arc_len = std::abs(c.a_sweep) * corner_radius;
    const int steps = std::max(1, static_cast<int>(std::floor(arc_len / ds)));
    for (int k = 0; k < steps; ++k) {
      const double a = c.a_begin + c.a_sweep * static_cast<double>(k) / steps;
      xs.push_back(c.cx + corner_radius * std::cos(a));
      ys.push_back(c.cy + corner_radius * std::sin(a));
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    push_arc(corners[i]);
    const Corner& from = corners[i];
    const Corner& to = corners[(i + 1) % n];
    push_line(from.exit_x, from.exit_y, to.entry_x, to.entry_y);
  }
}

TrackBundle build_track(const std::string& name) {
  TrackBundle bundle;
  std::vector<double> xs, ys;
  double halfwidth = 1.0;

  if (name == "oval") {
    track::oval_centerline(6.0, 1.4, 0.05, xs, ys);
    halfwidth = 1.0;
    bundle.planner.a_lat_max = 4.0;
    bundle.planner.a_long_max = 3.5;
    bundle.planner.v_max = 5.0;
  } else if (name == "trail") {
    // Wide, gentle stadium for perception and gap-keeping evaluations: the
    // racing line keeps comfortable wall margins so a trailed opponent never
    // blends into the boundary returns.
    track::oval_centerline(7.0, 2.2, 0.05, xs, ys);
    halfwidth = 1.5;
    bundle.planner.a_lat_max = 4.0;
    bundle.planner.a_long_max = 3.5;
    bundle.planner.v_max = 6.0;
  } else if (name == "race") {
    // Chicaned mixed course; asymmetric by construction.
    // Mixed course: two long straights, a hairpin-ish end, a chicane notch.
    const std::vector<std::pair<double, double>> verts = {
        {0.0, 0.0}, {9.0, 0.0}, {12.5, 2.5}, {12.5, 6.0}, {8.5, 8.5},
        {3.5, 6.5}, {-1.5, 8.5}, {-5.5, 6.0}, {-5.5, 2.0}, {-2.5, 0.0}};
    rounded_polygon_centerline(verts, 1.6, 0.05, xs, ys);
    halfwidth = 1.2;
    bundle.planner.a_lat_max = 5.0;
    bundle.planner.a_long_max = 4.0;
    bundle.planner.v_max = 7.0;
  } else if (name == "annulus") {
    const double r = 5.0;
    for (double a = 0.0; a < 2.0 * kPi; a += 0.05 / r) {
      xs.push_back(r * std::cos(a));
      ys.push_back(r * std::sin(a));
    }
    halfwidth = 1.0;
    bundle.planner.a_lat_max = 4.0;
    bundle.planner.a_long_max = 3.0;
    bundle.planner.v_max = 5.0;
  } else {
    throw track::TrackError("build_track: unknown track '" + name + "'");
  }

  bundle.grid = track::render_corridor_grid(xs, ys, halfwidth, 0.05);

  if (name == "oval") {
    // Wall studs on one straight: scan-distinguishable features that break
    // the stadium's rotational symmetry, as on any physical track.
    // Blocks centered on the wall line stick ~0.2 m into the corridor with
    // no free gap behind them.
    auto stud = [&](double wx, double wy) {
      double gx, gy;
      bundle.grid.world_to_grid(wx, wy, gx, gy);
      const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
      for (int dy = -4; dy <= 4; ++dy)
        for (int dx = 0; dx < 3; ++dx) bundle.grid.set(ix + dx, iy + dy, track::Cell::kOccupied);
    };
    stud(1.0, -2.4);
    stud(-2.2, -2.4);
    stud(2.6, 2.4);
  }

  const planner::Centerline center = planner::extract_centerline(bundle.grid);
  planner::MinCurvatureResult opt = planner::min_curvature_qp(center, bundle.planner);
  planner::fill_velocity_profile(opt.raceline, bundle.planner);
  bundle.raceline = std::move(opt.raceline);
  return bundle;
}

TrackBundle write_track(const std::string& name, const std::string& dir) {
  TrackBundle bundle = build_track(name);
  fs::create_directories(dir);
  const fs::path base = fs::path(dir) / name;
  bundle.map_yaml = (base.string() + ".yaml");
  const std::string pgm = base.string() + ".pgm";
  track::save_map(bundle.grid, bundle.map_yaml, pgm);
  bundle.raceline_csv = base.string() + "_raceline.csv";
  track::save_raceline_csv(bundle.raceline, bundle.raceline_csv);
  return bundle;
}

}  // namespace rs::harness
