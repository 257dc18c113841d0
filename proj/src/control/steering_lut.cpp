#include "racestack/control/steering_lut.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace rs::control {
namespace {

constexpr char kMagic[4] = {'S', 'L', 'U', '1'};

// Steady-state lateral acceleration at fixed speed and steering, or NaN when
// the rollout never settles (unstable pair).
double rollout_steady_accel(const sim::SingleTrackParams& p, double v, double delta,
                            const LutGenConfig& cfg) {
  // Lateral dynamics only: v_x is held constant, steering is pinned.
  double v_y = 0.0, omega = 0.0;
  const int steps = static_cast<int>(std::llround(cfg.sim_time / cfg.dt));
  const int window = static_cast<int>(std::llround(cfg.settle_window / cfg.dt));
  std::vector<double> omega_tail;
  omega_tail.reserve(window);

  auto deriv = [&](double vy, double om, double& dvy, double& dom) {
    const double alpha_f = delta - std::atan((vy + p.l_f * om) / v);
    const double alpha_r = -std::atan((vy - p.l_r * om) / v);
    const double f_yf = p.mu_scale * p.tire_front.force(alpha_f);
    const double f_yr = p.mu_scale * p.tire_rear.force(alpha_r);
    dvy = (f_yf * std::cos(delta) + f_yr) / p.m - v * om;
    dom = (p.l_f * f_yf * std::cos(delta) - p.l_r * f_yr) / p.I_zz;
  };

  for (int i = 0; i < steps; ++i) {
    double k1vy, k1om, k2vy, k2om, k3vy, k3om, k4vy, k4om;
    deriv(v_y, omega, k1vy, k1om);
    deriv(v_y + 0.5 * cfg.dt * k1vy, omega + 0.5 * cfg.dt * k1om, k2vy, k2om);
    deriv(v_y + 0.5 * cfg.dt * k2vy, omega + 0.5 * cfg.dt * k2om, k3vy, k3om);
    deriv(v_y + cfg.dt * k3vy, omega + cfg.dt * k3om, k4vy, k4om);
    v_y += cfg.dt / 6.0 * (k1vy + 2 * k2vy + 2 * k3vy + k4vy);
    omega += cfg.dt / 6.0 * (k1om + 2 * k2om + 2 * k3om + k4om);

    if (!std::isfinite(v_y) || !std::isfinite(omega) || std::abs(v_y) > 2.0 * v ||
        std::abs(omega) > 50.0)
      return std::nan("");  // diverged

    if (i >= steps - window) omega_tail.push_back(omega);
  }

  const auto [lo, hi] = std::minmax_element(omega_tail.begin(), omega_tail.end());
  if (*hi - *lo > cfg.settle_tol) return std::nan("");
  return v * omega;
}

}  // namespace

SteeringLookupTable generate_steering_lut(const sim::SingleTrackParams& params,
                                          const LutGenConfig& cfg) {
  SteeringLookupTable lut;
  lut.v_min = cfg.v_min;
  lut.v_step = cfg.v_step;

  std::vector<double> deltas;
  for (double d = 0.0; d < cfg.delta_fine_limit - 1e-12; d += cfg.delta_fine_step)
    deltas.push_back(d);
  for (double d = cfg.delta_fine_limit; d <= cfg.delta_max + 1e-12; d += cfg.delta_step)
    deltas.push_back(d);

  const int n_rows = static_cast<int>(std::llround((cfg.v_max - cfg.v_min) / cfg.v_step)) + 1;
  for (int r = 0; r < n_rows; ++r) {
    const double v = cfg.v_min + r * cfg.v_step;
    std::vector<SteeringLookupTable::Entry> row;
    double prev_ac = -1e9;
    for (double delta : deltas) {
      const double a_c = rollout_steady_accel(params, v, delta, cfg);
      if (std::isnan(a_c)) break;          // stability edge of this row
      if (a_c <= prev_ac + 1e-9) break;    // monotone region ends (post-peak)
      row.push_back({static_cast<float>(a_c), static_cast<float>(delta)});
      prev_ac = a_c;
    }
    lut.rows.push_back(std::move(row));
  }
  return lut;
}

double SteeringLookupTable::steering_for(double v, double a_c, bool* saturated) const {
  if (saturated) *saturated = false;
  if (rows.empty()) return 0.0;

  const double sign = a_c < 0.0 ? -1.0 : 1.0;
  const double mag = std::abs(a_c);

  const double v_clamped = std::clamp(
      v, v_min, v_min + v_step * static_cast<double>(rows.size() - 1));
  const double pos = (v_clamped - v_min) / v_step;
  const std::size_t r0 = std::min(static_cast<std::size_t>(pos), rows.size() - 1);
  const std::size_t r1 = std::min(r0 + 1, rows.size() - 1);
  const double frac = std::clamp(pos - static_cast<double>(r0), 0.0, 1.0);

  auto row_lookup = [&](const std::vector<Entry>& row, bool* sat) -> double {
    if (row.empty()) return 0.0;
    if (mag >= row.back().a_c) {
      if (sat) *sat = true;
      return row.back().delta;
    }
    // Binary search for the bracketing pair.
    std::size_t lo = 0, hi = row.size() - 1;
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (row[mid].a_c <= mag)
        lo = mid;
      else
        hi = mid;
    }
    const double a0 = row[lo].a_c, a1 = row[hi].a_c;
    const double t = a1 > a0 ? (mag - a0) / (a1 - a0) : 0.0;
    return row[lo].delta + t * (row[hi].delta - row[lo].delta);
  };

  bool sat0 = false, sat1 = false;
  const double d0 = row_lookup(rows[r0], &sat0);
  const double d1 = row_lookup(rows[r1], &sat1);
  if (saturated) *saturated = sat0 || sat1;
  return sign * ((1.0 - frac) * d0 + frac * d1);
}

double SteeringLookupTable::lateral_accel_for(double v, double delta) const {
  if (rows.empty()) return -1.0;
  const double v_clamped = std::clamp(
      v, v_min, v_min + v_step * static_cast<double>(rows.size() - 1));
  const std::size_t r =
      static_cast<std::size_t>(std::llround((v_clamped - v_min) / v_step));
  const auto& row = rows[std::min(r, rows.size() - 1)];
  if (row.empty() || delta > row.back().delta) return -1.0;
  const double mag = std::abs(delta);
  std::size_t lo = 0;
  while (lo + 1 < row.size() && row[lo + 1].delta < mag) ++lo;
  if (lo + 1 >= row.size()) return row.back().a_c;
  const double d0 = row[lo].delta, d1 = row[lo + 1].delta;
  const double t = d1 > d0 ? (mag - d0) / (d1 - d0) : 0.0;
  return row[lo].a_c + t * (row[lo + 1].a_c - row[lo].a_c);
}

void save_lut(const SteeringLookupTable& lut, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sim::SimError("save_lut: cannot write " + path);
  out.write(kMagic, 4);
  const float v_min = static_cast<float>(lut.v_min);
  const float v_step = static_cast<float>(lut.v_step);
  const std::uint32_t n_rows = static_cast<std::uint32_t>(lut.rows.size());
  out.write(reinterpret_cast<const char*>(&v_min), 4);
  out.write(reinterpret_cast<const char*>(&v_step), 4);
  out.write(reinterpret_cast<const char*>(&n_rows), 4);
  for (const auto& row : lut.rows) {
    const std::uint32_t n = static_cast<std::uint32_t>(row.size());
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (const auto& e : row) {
      out.write(reinterpret_cast<const char*>(&e.a_c), 4);
      out.write(reinterpret_cast<const char*>(&e.delta), 4);
    }
  }
}

SteeringLookupTable load_lut(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sim::SimError("load_lut: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw sim::SimError("load_lut: bad magic/version in " + path);
  float v_min = 0, v_step = 0;
  std::uint32_t n_rows = 0;
  in.read(reinterpret_cast<char*>(&v_min), 4);
  in.read(reinterpret_cast<char*>(&v_step), 4);
  in.read(reinterpret_cast<char*>(&n_rows), 4);
  SteeringLookupTable lut;
  lut.v_min = v_min;
  lut.v_step = v_step;
  lut.rows.resize(n_rows);
  for (auto& row : lut.rows) {
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    row.resize(n);
    for (auto& e : row) {
      in.read(reinterpret_cast<char*>(&e.a_c), 4);
      in.read(reinterpret_cast<char*>(&e.delta), 4);
    }
  }
  if (!in) throw sim::SimError("load_lut: truncated file " + path);
  return lut;
}

}  // namespace rs::control
