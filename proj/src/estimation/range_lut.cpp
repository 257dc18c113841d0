#include "racestack/estimation/range_lut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "racestack/sim/lidar.hpp"

namespace rs::estimation {
namespace {

// 1D squared distance transform (Felzenszwalb & Huttenlocher).
void dt_1d(const std::vector<float>& f, std::vector<float>& out, int n) {
  std::vector<int> v(n);
  std::vector<float> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<float>::infinity();
  z[1] = std::numeric_limits<float>::infinity();
  for (int q = 1; q < n; ++q) {
    float s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0f * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0f * (q - v[k]));
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<float>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const float d = static_cast<float>(q - v[k]);
    out[q] = d * d + f[v[k]];
  }
}

}  // namespace

std::vector<float> distance_transform_cells(const track::OccupancyGrid& grid) {
  const int w = grid.width, h = grid.height;
  const float inf = 1e12f;
  std::vector<float> d(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      d[static_cast<std::size_t>(y) * w + x] = grid.occupied(x, y) ? 0.0f : inf;

  std::vector<float> col(h), col_out(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col[y] = d[static_cast<std::size_t>(y) * w + x];
    dt_1d(col, col_out, h);
    for (int y = 0; y < h; ++y) d[static_cast<std::size_t>(y) * w + x] = col_out[y];
  }
  std::vector<float> row(w), row_out(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) row[x] = d[static_cast<std::size_t>(y) * w + x];
    dt_1d(row, row_out, w);
    for (int x = 0; x < w; ++x)
      d[static_cast<std::size_t>(y) * w + x] = std::sqrt(row_out[x]);
  }
  return d;
}

RangeLut::RangeLut(const track::OccupancyGrid& grid) : RangeLut(grid, Config()) {}

RangeLut::RangeLut(const track::OccupancyGrid& grid, const Config& cfg)
    : cfg_(cfg), grid_(grid), width_(grid.width), height_(grid.height) {
  if (!grid_.valid()) throw track::TrackError("RangeLut: invalid grid");

  edt_ = distance_transform_cells(grid_);
  for (float& v : edt_) v = v * static_cast<float>(grid_.resolution);

  const std::size_t dense_bytes = static_cast<std::size_t>(width_) * height_ *
                                  static_cast<std::size_t>(cfg_.theta_bins) * sizeof(std::uint16_t);
  if (!cfg_.allow_dense || dense_bytes > cfg_.memory_budget) return;

  quantum_ = grid_.resolution / 4.0;
  table_.assign(static_cast<std::size_t>(width_) * height_ * cfg_.theta_bins, 0);
  for (int iy = 0; iy < height_; ++iy) {
    for (int ix = 0; ix < width_; ++ix) {
      const std::size_t base =
          (static_cast<std::size_t>(iy) * width_ + ix) * static_cast<std::size_t>(cfg_.theta_bins);
      if (grid_.at(ix, iy) == track::Cell::kOccupied) continue;  // zeros mean contact
      double wx, wy;
      grid_.grid_to_world(ix + 0.5, iy + 0.5, wx, wy);
      for (int b = 0; b < cfg_.theta_bins; ++b) {
        const double theta = grid_.origin.psi + 2.0 * kPi * b / cfg_.theta_bins;
        const double r = range_marched(wx, wy, theta);
        table_[base + b] =
            static_cast<std::uint16_t>(std::min(r / quantum_, 65535.0));
      }
    }
  }
}

double RangeLut::range_marched(double x, double y, double theta) const {
  // Long jumps by the distance field while the clearance guarantees the
  // segment cannot touch any occupied cell; the wall neighborhood is then
  // finished with the exact grid traversal, so results match direct ray
  // casting.
  const double c = std::cos(theta), s = std::sin(theta);
  const double res = grid_.resolution;
  double r = 0.0;
  for (int iter = 0; iter < 2048; ++iter) {
    const double px = x + r * c, py = y + r * s;
    double gx, gy;
    grid_.world_to_grid(px, py, gx, gy);
    const int ix = static_cast<int>(std::floor(gx));
    const int iy = static_cast<int>(std::floor(gy));
    const float d = edt_at(ix, iy);
    if (d < 0.0f) return cfg_.max_range;  // left the mapped area
    if (d <= 2.0 * res) {
      const double rest = sim::cast_ray(grid_, px, py, theta, cfg_.max_range - r);
      return std::min(r + rest, cfg_.max_range);
    }
    r += static_cast<double>(d) - 1.5 * res;
    if (r >= cfg_.max_range) return cfg_.max_range;
  }
  return cfg_.max_range;
}

double RangeLut::range(double x, double y, double theta) const {
  if (table_.empty()) return range_marched(x, y, theta);
  double gx, gy;
  grid_.world_to_grid(x, y, gx, gy);
  const int ix = static_cast<int>(std::floor(gx));
  const int iy = static_cast<int>(std::floor(gy));
  if (ix < 0 || iy < 0 || ix >= width_ || iy >= height_) return cfg_.max_range;
  double rel = std::fmod(theta - grid_.origin.psi, 2.0 * kPi);
  if (rel < 0.0) rel += 2.0 * kPi;
  int bin = static_cast<int>(std::lround(rel * cfg_.theta_bins / (2.0 * kPi)));
  if (bin >= cfg_.theta_bins) bin = 0;
  const std::size_t base =
      (static_cast<std::size_t>(iy) * width_ + ix) * static_cast<std::size_t>(cfg_.theta_bins);
  return table_[base + bin] * quantum_;
}

}  // namespace rs::estimation
