#pragma once
#include <string>

#include "racestack/track/types.hpp"

namespace rs::track {

// Raceline CSV: semicolon-separated, one row per waypoint, header
// `s;x;y;psi;kappa;v;d_left;d_right`.
Raceline load_raceline_csv(const std::string& path);
void save_raceline_csv(const Raceline& line, const std::string& path);

}  // namespace rs::track
