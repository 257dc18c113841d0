#pragma once
#include <cstdint>
#include <vector>

#include "racestack/track/types.hpp"

namespace rs::estimation {

// Precomputed expected-range field for the beam sensor model.
//
// The base structure is a Euclidean distance transform of the occupied
// cells, which makes a single range query an O(1)-amortized sphere-tracing
// march (a handful of distance lookups). On top of that, when the dense
// (x, y, theta) table fits the memory budget, every free cell stores
// quantized ranges at 1-degree bins for true constant-time nearest lookup.
// Large grids (1024x1024 and up) exceed the budget and automatically fall
// back to the marching path, keeping memory bounded by one float per cell.
class RangeLut {
 public:
  struct Config {
    double max_range = 10.0;           // m
    int theta_bins = 360;              // dense-table heading resolution
    std::size_t memory_budget = 256u << 20;  // bytes for the dense table
    bool allow_dense = true;
  };

  explicit RangeLut(const track::OccupancyGrid& grid);
  RangeLut(const track::OccupancyGrid& grid, const Config& cfg);

  // Expected range from world pose (x, y, heading).
  double range(double x, double y, double theta) const;

  // Distance-transform march only (bypasses the dense table); exposed for
  // the equivalence tests.
  double range_marched(double x, double y, double theta) const;

  bool dense() const { return !table_.empty(); }
  double max_range() const { return cfg_.max_range; }
  std::size_t memory_bytes() const {
    return table_.size() * sizeof(std::uint16_t) + edt_.size() * sizeof(float);
  }

 private:
  float edt_at(int ix, int iy) const {
    if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) return -1.0f;
    return edt_[static_cast<std::size_t>(iy) * width_ + ix];
  }

  Config cfg_;
  track::OccupancyGrid grid_;
  int width_ = 0, height_ = 0;
  std::vector<float> edt_;             // m to nearest occupied cell center
  std::vector<std::uint16_t> table_;   // quantized ranges, cell-major, theta-minor
  double quantum_ = 0.0;               // m per table count
};

// Exact squared Euclidean distance transform (two-pass), in cell units.
// Zero at occupied cells. Exposed for tests.
std::vector<float> distance_transform_cells(const track::OccupancyGrid& grid);

}  // namespace rs::estimation
