#pragma once
#include <vector>

#include "racestack/track/types.hpp"

namespace rs::track {

// Synthetic track builders used by tests, tools, and scenario setup.

// Closed circle of radius R centered at (cx, cy), counter-clockwise. The
// requested step is adjusted to the nearest value that divides the
// circumference so the spacing stays uniform across the seam.
Raceline make_circle_raceline(double radius, double step, double v = 2.0,
                              double halfwidth = 1.0, double cx = 0.0, double cy = 0.0);

// Open straight segment along +x starting at the origin (test fixture).
Raceline make_straight_raceline(double length, double step, double v = 2.0,
                                double halfwidth = 1.0);

// Closed stadium oval: two straights of given length joined by semicircles of
// given radius, centered at the origin. total length = 2*straight + 2*pi*r.
Raceline make_oval_raceline(double straight, double radius, double step, double v = 2.0,
                            double halfwidth = 1.0);

// Uniformly resamples a closed polyline at the given step and fills headings,
// curvatures (three-point finite difference), and constant metadata.
Raceline raceline_from_polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                                double step, double v, double halfwidth);

// Rasterizes a closed centerline corridor into an occupancy grid: cells within
// halfwidth of the polyline are free, a wall_thickness band beyond that is
// occupied, everything else unknown.
OccupancyGrid render_corridor_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                                   double halfwidth, double resolution,
                                   double wall_thickness = 0.15, double margin = 1.0);

// Centerline sample points of a stadium oval (helper for map rendering).
void oval_centerline(double straight, double radius, double ds, std::vector<double>& xs,
                     std::vector<double>& ys);

}  // namespace rs::track
