#pragma once
#include <string>

#include "racestack/track/types.hpp"

namespace rs::track {

// Map files follow the common robotics export layout: a P5 (binary, 8-bit)
// portable graymap next to a YAML sidecar holding {image, resolution,
// origin: [x, y, psi], occupied_thresh, free_thresh, negate}.
struct MapThresholds {
  double occupied = 0.65;
  double free = 0.196;
  bool negate = false;
};

OccupancyGrid load_map(const std::string& yaml_path);

void save_map(const OccupancyGrid& grid, const std::string& yaml_path,
              const std::string& pgm_path, const MapThresholds& thr = {});

}  // namespace rs::track
