#pragma once
#include <string>
#include <vector>

#include "racestack/planner/min_curvature.hpp"
#include "racestack/track/types.hpp"

namespace rs::harness {

// Closed centerline through a rounded polygon: corners replaced by tangent
// arcs of the given radius, edges sampled at ds.
void rounded_polygon_centerline(const std::vector<std::pair<double, double>>& vertices,
                                double corner_radius, double ds, std::vector<double>& xs,
                                std::vector<double>& ys);

struct TrackBundle {
  track::OccupancyGrid grid;
  track::Raceline raceline;        // optimized, velocity profile filled
  planner::PlannerParams planner;
  std::string map_yaml;            // paths once written
  std::string raceline_csv;
};

// Built-in desk-scale tracks:
//   "oval"    ~21 m stadium, 2 m corridor (localization experiments)
//   "race"    ~40 m mixed course, 2.4 m corridor (time trials, head-to-head)
//   "annulus" ring R=4..6 m (planner oracle)
TrackBundle build_track(const std::string& name);

// Builds and writes <name>.pgm/.yaml/_raceline.csv under dir.
TrackBundle write_track(const std::string& name, const std::string& dir);

}  // namespace rs::harness
