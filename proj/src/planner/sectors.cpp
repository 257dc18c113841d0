#include "racestack/planner/sectors.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace rs::planner {
namespace {

void validate(const SectorConfig& cfg, double s_max) {
  const std::size_t k = cfg.boundaries.size();
  if (k == 0 || cfg.scalers.size() != k)
    throw PlannerError("sectors: need one scaler per boundary");
  for (std::size_t i = 0; i < k; ++i) {
    if (cfg.boundaries[i] < 0.0 || cfg.boundaries[i] >= s_max)
      throw PlannerError("sectors: boundary outside [0, s_max)");
    if (i > 0 && cfg.boundaries[i] <= cfg.boundaries[i - 1])
      throw PlannerError("sectors: boundaries must be strictly increasing");
    if (cfg.scalers[i] < 0.0 || cfg.scalers[i] > 1.0)
      throw PlannerError("sectors: scaler outside [0, 1]");
  }
  for (std::size_t i = 0; i < k; ++i) {
    const double next = i + 1 < k ? cfg.boundaries[i + 1] : cfg.boundaries[0] + s_max;
    if (next - cfg.boundaries[i] < 2.0 * cfg.junction_blend)
      throw PlannerError("sectors: sector shorter than twice the blend window");
  }
}

}  // namespace

SectorConfig SectorConfig::uniform(double s_max, std::size_t count, double scaler) {
  SectorConfig cfg;
  for (std::size_t i = 0; i < count; ++i) {
    cfg.boundaries.push_back(s_max * static_cast<double>(i) / static_cast<double>(count));
    cfg.scalers.push_back(scaler);
  }
  return cfg;
}

double sector_scaler_at(const SectorConfig& cfg, double s, double s_max) {
  const std::size_t k = cfg.boundaries.size();
  const double sw = track::wrap_s(s, s_max);

  // Sector index: last boundary at or before sw (cyclic).
  std::size_t idx = k - 1;
  for (std::size_t i = 0; i < k; ++i) {
    if (cfg.boundaries[i] <= sw) idx = i;
  }
  double value = cfg.scalers[idx];

  // Blend across the nearest junction, half a window to each side.
  const double half = cfg.junction_blend / 2.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double delta = track::cyclic_diff(sw, cfg.boundaries[i], s_max);
    if (std::abs(delta) <= half) {
      const std::size_t before = (i + k - 1) % k;
      const double t = (delta + half) / cfg.junction_blend;  // 0 at -half, 1 at +half
      value = cfg.scalers[before] + t * (cfg.scalers[i] - cfg.scalers[before]);
      break;
    }
  }
  return value;
}

track::Raceline apply_sectors(const track::Raceline& line, const SectorConfig& cfg) {
  validate(cfg, line.s_max);
  track::Raceline out = line;
  for (std::size_t i = 0; i < line.size(); ++i)
    out.v[i] = line.v[i] * sector_scaler_at(cfg, line.s[i], line.s_max);
  return out;
}

SectorConfig load_sectors_yaml(const std::string& path) {
  YAML::Node node = YAML::LoadFile(path);
  SectorConfig cfg;
  for (const auto& b : node["boundaries"]) cfg.boundaries.push_back(b.as<double>());
  for (const auto& s : node["scalers"]) cfg.scalers.push_back(s.as<double>());
  if (node["junction_blend"]) cfg.junction_blend = node["junction_blend"].as<double>();
  return cfg;
}

void save_sectors_yaml(const SectorConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PlannerError("sectors: cannot write " + path);
  out << "boundaries: [";
  for (std::size_t i = 0; i < cfg.boundaries.size(); ++i)
    out << (i ? ", " : "") << cfg.boundaries[i];
  out << "]\nscalers: [";
  for (std::size_t i = 0; i < cfg.scalers.size(); ++i) out << (i ? ", " : "") << cfg.scalers[i];
  out << "]\njunction_blend: " << cfg.junction_blend << "\n";
}

}  // namespace rs::planner
