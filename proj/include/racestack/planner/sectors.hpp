#pragma once
#include <string>
#include <vector>

#include "racestack/planner/centerline.hpp"
#include "racestack/track/types.hpp"

namespace rs::planner {

// Per-sector multiplicative velocity scalers. Sector i spans
// [boundaries[i], boundaries[i+1]) cyclically; scalers are in [0, 1] and the
// transition is blended linearly over junction_blend meters centered at each
// boundary.
struct SectorConfig {
  std::vector<double> boundaries;  // m, sorted, within [0, s_max)
  std::vector<double> scalers;     // one per sector, in [0, 1]
  double junction_blend = 1.0;     // m

  static SectorConfig uniform(double s_max, std::size_t count, double scaler = 0.5);
};

// Scaler value at arc position s (with junction blending).
double sector_scaler_at(const SectorConfig& cfg, double s, double s_max);

// v'(s) = sigma(s) * v(s).
track::Raceline apply_sectors(const track::Raceline& line, const SectorConfig& cfg);

SectorConfig load_sectors_yaml(const std::string& path);
void save_sectors_yaml(const SectorConfig& cfg, const std::string& path);

}  // namespace rs::planner
