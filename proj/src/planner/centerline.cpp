#include "racestack/planner/centerline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>

namespace rs::planner {
namespace {

using track::Cell;
using track::OccupancyGrid;

struct Mask {
  int w = 0, h = 0;
  std::vector<std::uint8_t> v;

  std::uint8_t at(int x, int y) const {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0;
    return v[static_cast<std::size_t>(y) * w + x];
  }
  void set(int x, int y, std::uint8_t val) { v[static_cast<std::size_t>(y) * w + x] = val; }
};

Mask binarize_free(const OccupancyGrid& grid) {
  Mask m;
  m.w = grid.width;
  m.h = grid.height;
  m.v.assign(static_cast<std::size_t>(m.w) * m.h, 0);
  for (int y = 0; y < m.h; ++y)
    for (int x = 0; x < m.w; ++x) m.set(x, y, grid.at(x, y) == Cell::kFree ? 1 : 0);
  return m;
}

Mask erode(const Mask& in) {
  Mask out = in;
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      std::uint8_t keep = 1;
      for (int dy = -1; dy <= 1 && keep; ++dy)
        for (int dx = -1; dx <= 1 && keep; ++dx)
          if (!in.at(x + dx, y + dy)) keep = 0;
      out.set(x, y, keep);
    }
  return out;
}

Mask dilate(const Mask& in) {
  Mask out = in;
  for (int y = 0; y < in.h; ++y)
    for (int x = 0; x < in.w; ++x) {
      std::uint8_t any = 0;
      for (int dy = -1; dy <= 1 && !any; ++dy)
        for (int dx = -1; dx <= 1 && !any; ++dx)
          if (in.at(x + dx, y + dy)) any = 1;
      out.set(x, y, any);
    }
  return out;
}

Mask keep_largest_component(const Mask& in) {
  Mask label = in;
  std::fill(label.v.begin(), label.v.end(), 0);
  Mask out = in;
  std::fill(out.v.begin(), out.v.end(), 0);

  std::vector<std::pair<int, int>> best_cells, cells;
  for (int sy = 0; sy < in.h; ++sy) {
    for (int sx = 0; sx < in.w; ++sx) {
      if (!in.at(sx, sy) || label.at(sx, sy)) continue;
      cells.clear();
      std::queue<std::pair<int, int>> queue;
      queue.emplace(sx, sy);
      label.set(sx, sy, 1);
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop();
        cells.emplace_back(x, y);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx2 = x + dx, ny2 = y + dy;
            if (in.at(nx2, ny2) && !label.at(nx2, ny2)) {
              label.set(nx2, ny2, 1);
              queue.emplace(nx2, ny2);
            }
          }
      }
      if (cells.size() > best_cells.size()) best_cells.swap(cells);
    }
  }
  for (auto [x, y] : best_cells) out.set(x, y, 1);
  return out;
}

int neighbor_count(const Mask& m, int x, int y) {
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if ((dx || dy) && m.at(x + dx, y + dy)) ++n;
  return n;
}

// Zhang-Suen two-subiteration thinning.
void thin(Mask& m) {
  bool changed = true;
  std::vector<std::pair<int, int>> to_clear;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      to_clear.clear();
      for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
          if (!m.at(x, y)) continue;
          const int p2 = m.at(x, y - 1), p3 = m.at(x + 1, y - 1), p4 = m.at(x + 1, y);
          const int p5 = m.at(x + 1, y + 1), p6 = m.at(x, y + 1), p7 = m.at(x - 1, y + 1);
          const int p8 = m.at(x - 1, y), p9 = m.at(x - 1, y - 1);
          const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
          if (b < 2 || b > 6) continue;
          const int a = (p2 == 0 && p3 == 1) + (p3 == 0 && p4 == 1) + (p4 == 0 && p5 == 1) +
                        (p5 == 0 && p6 == 1) + (p6 == 0 && p7 == 1) + (p7 == 0 && p8 == 1) +
                        (p8 == 0 && p9 == 1) + (p9 == 0 && p2 == 1);
          if (a != 1) continue;
          if (pass == 0) {
            if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
          } else {
            if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
          }
          to_clear.emplace_back(x, y);
        }
      }
      for (auto [x, y] : to_clear) m.set(x, y, 0);
      if (!to_clear.empty()) changed = true;
    }
  }
}

// A pixel is simple when its remaining ring neighbors stay 8-connected among
// themselves after deletion, so removing it cannot split the curve.
bool is_simple(const Mask& m, int x, int y) {
  std::vector<std::pair<int, int>> ring;
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if ((dx || dy) && m.at(x + dx, y + dy)) ring.emplace_back(x + dx, y + dy);
  if (ring.empty()) return false;
  std::vector<int> label(ring.size(), -1);
  int components = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = components;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < ring.size(); ++j) {
        if (label[j] >= 0) continue;
        if (std::abs(ring[cur].first - ring[j].first) <= 1 &&
            std::abs(ring[cur].second - ring[j].second) <= 1) {
          label[j] = components;
          stack.push_back(j);
        }
      }
    }
    ++components;
  }
  return components == 1;
}

// Removes skeleton hairs and staircase thickness: endpoints go away, and
// redundant pixels (degree >= 3 but simple) collapse until the remaining
// loop is a clean chain of degree-2 pixels.
void prune_spurs(Mask& m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < m.h; ++y)
      for (int x = 0; x < m.w; ++x) {
        if (!m.at(x, y)) continue;
        const int degree = neighbor_count(m, x, y);
        if (degree < 2 || (degree >= 3 && is_simple(m, x, y))) {
          m.set(x, y, 0);
          changed = true;
        }
      }
  }
}

std::vector<std::pair<int, int>> trace_loop(const Mask& m) {
  // Component sizes for the error report.
  Mask seen = m;
  std::fill(seen.v.begin(), seen.v.end(), 0);
  std::vector<std::vector<std::pair<int, int>>> components;
  for (int sy = 0; sy < m.h; ++sy)
    for (int sx = 0; sx < m.w; ++sx) {
      if (!m.at(sx, sy) || seen.at(sx, sy)) continue;
      components.emplace_back();
      std::queue<std::pair<int, int>> queue;
      queue.emplace(sx, sy);
      seen.set(sx, sy, 1);
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop();
        components.back().emplace_back(x, y);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx2 = x + dx, ny2 = y + dy;
            if (m.at(nx2, ny2) && !seen.at(nx2, ny2)) {
              seen.set(nx2, ny2, 1);
              queue.emplace(nx2, ny2);
            }
          }
      }
    }

  if (components.empty()) throw MultiLoopError("extract_centerline: no skeleton loop found", {});
  if (components.size() > 1) {
    std::vector<std::size_t> sizes;
    for (const auto& c : components) sizes.push_back(c.size());
    throw MultiLoopError("extract_centerline: skeleton is not a single closed loop (" +
                             std::to_string(components.size()) + " candidates)",
                         sizes);
  }

  // Walk the cycle: always move to an unvisited neighbor, preferring
  // 4-connected steps so diagonal shortcuts do not skip pixels.
  const auto& comp = components[0];
  Mask visited = m;
  std::fill(visited.v.begin(), visited.v.end(), 0);
  std::vector<std::pair<int, int>> loop;
  auto [cx, cy] = comp[0];
  loop.emplace_back(cx, cy);
  visited.set(cx, cy, 1);
  const int order[8][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
  while (true) {
    bool moved = false;
    for (const auto& d : order) {
      const int nx2 = cx + d[0], ny2 = cy + d[1];
      if (m.at(nx2, ny2) && !visited.at(nx2, ny2)) {
        cx = nx2;
        cy = ny2;
        visited.set(cx, cy, 1);
        loop.emplace_back(cx, cy);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  // The walk must close back onto its start and cover the component.
  const bool closed = std::max(std::abs(loop.back().first - loop.front().first),
                               std::abs(loop.back().second - loop.front().second)) <= 1;
  if (!closed || loop.size() < comp.size() * 9 / 10 || loop.size() < 8)
    throw MultiLoopError("extract_centerline: skeleton loop could not be traced", {comp.size()});
  return loop;
}

// Savitzky-Golay smoothing weights for the window center.
std::vector<double> savgol_weights(int window, int order) {
  const int half = window / 2;
  Eigen::MatrixXd vander(window, order + 1);
  for (int i = 0; i < window; ++i) {
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      vander(i, j) = p;
      p *= static_cast<double>(i - half);
    }
  }
  const Eigen::MatrixXd gram = vander.transpose() * vander;
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(order + 1);
  e0(0) = 1.0;
  const Eigen::VectorXd c = gram.ldlt().solve(e0);
  const Eigen::VectorXd w = vander * c;
  return {w.data(), w.data() + window};
}

std::vector<double> savgol_cyclic(const std::vector<double>& f, const std::vector<double>& w) {
  const int n = static_cast<int>(f.size());
  const int half = static_cast<int>(w.size()) / 2;
  std::vector<double> out(f.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = -half; k <= half; ++k) acc += w[k + half] * f[((i + k) % n + n) % n];
    out[i] = acc;
  }
  return out;
}

// Free distance from (x, y) along direction (nx, ny), refined to sub-cell
// accuracy by bisection between the last free and first blocked probe.
double march_normal(const OccupancyGrid& grid, double x, double y, double nx, double ny,
                    double max_width) {
  const double step = grid.resolution / 2.0;
  double prev = 0.0;
  for (double r = step; r <= max_width; r += step) {
    double gx, gy;
    grid.world_to_grid(x + r * nx, y + r * ny, gx, gy);
    const Cell c = grid.at(static_cast<int>(std::floor(gx)), static_cast<int>(std::floor(gy)));
    if (c != Cell::kFree) {
      double lo = prev, hi = r;
      for (int it = 0; it < 8; ++it) {
        const double mid = 0.5 * (lo + hi);
        grid.world_to_grid(x + mid * nx, y + mid * ny, gx, gy);
        if (grid.at(static_cast<int>(std::floor(gx)), static_cast<int>(std::floor(gy))) ==
            Cell::kFree)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = r;
  }
  return max_width;
}

}  // namespace

Centerline extract_centerline(const OccupancyGrid& grid, const CenterlineParams& params) {
  if (!grid.valid()) throw PlannerError("extract_centerline: invalid grid");

  Mask mask = binarize_free(grid);
  for (int i = 0; i < params.open_iterations; ++i) mask = erode(mask);
  for (int i = 0; i < params.open_iterations; ++i) mask = dilate(mask);
  mask = keep_largest_component(mask);

  Mask skeleton = mask;
  thin(skeleton);
  prune_spurs(skeleton);
  const auto loop = trace_loop(skeleton);

  std::vector<double> xs(loop.size()), ys(loop.size());
  for (std::size_t i = 0; i < loop.size(); ++i)
    grid.grid_to_world(loop[i].first + 0.5, loop[i].second + 0.5, xs[i], ys[i]);

  const auto weights = savgol_weights(params.savgol_window, params.savgol_order);
  xs = savgol_cyclic(xs, weights);
  ys = savgol_cyclic(ys, weights);

  // Uniform resampling of the smoothed loop.
  const std::size_t m = xs.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    cum[i + 1] = cum[i] + std::hypot(xs[j] - xs[i], ys[j] - ys[i]);
  }
  const double total = cum[m];
  const std::size_t n = std::max<std::size_t>(8, static_cast<std::size_t>(std::llround(total / params.stepsize)));

  Centerline center;
  center.x.resize(n);
  center.y.resize(n);
  center.w_left.resize(n);
  center.w_right.resize(n);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(n);
    while (seg + 1 < m && cum[seg + 1] <= target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    const std::size_t j = (seg + 1) % m;
    center.x[i] = xs[seg] + t * (xs[j] - xs[seg]);
    center.y[i] = ys[seg] + t * (ys[j] - ys[seg]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    const double tx = center.x[next] - center.x[prev];
    const double ty = center.y[next] - center.y[prev];
    const double len = std::hypot(tx, ty);
    const double nx = -ty / len, ny = tx / len;  // left normal
    center.w_left[i] = march_normal(grid, center.x[i], center.y[i], nx, ny, params.max_width);
    center.w_right[i] = march_normal(grid, center.x[i], center.y[i], -nx, -ny, params.max_width);
  }
  return center;
}

}  // namespace rs::planner
