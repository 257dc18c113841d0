#pragma once
#include <stdexcept>
#include <string>
#include <vector>

#include "racestack/track/types.hpp"

namespace rs::planner {

struct Centerline {
  std::vector<double> x, y;             // m, closed loop, uniform spacing
  std::vector<double> w_left, w_right;  // m, free distance along the normal
  bool closed = true;

  std::size_t size() const { return x.size(); }
};

struct CenterlineParams {
  int open_iterations = 2;      // 3x3 morphological open passes
  int savgol_window = 21;       // points, odd
  int savgol_order = 3;
  double stepsize = 0.2;        // m, output spacing
  double max_width = 5.0;       // m, cap for the normal march
};

struct PlannerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MultiLoopError : PlannerError {
  MultiLoopError(std::string msg, std::vector<std::size_t> sizes)
      : PlannerError(std::move(msg)), loop_sizes(std::move(sizes)) {}
  std::vector<std::size_t> loop_sizes;  // candidate loop pixel counts
};

// Occupancy grid -> smoothed closed centerline with per-point boundary
// widths. Pipeline: binarize, morphological open, keep the largest free
// component, skeletonize (Zhang-Suen), prune spurs, trace the loop,
// Savitzky-Golay smooth, march normals for widths, resample uniformly.
Centerline extract_centerline(const track::OccupancyGrid& grid,
                              const CenterlineParams& params = {});

}  // namespace rs::planner
