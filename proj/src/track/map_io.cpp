#include "racestack/track/map_io.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>

namespace rs::track {
namespace {

namespace fs = std::filesystem;

int read_pgm_token(std::istream& in) {
  // PGM allows '#' comments between whitespace-separated header tokens.
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  in >> value;
  return value;
}

}  // namespace

OccupancyGrid load_map(const std::string& yaml_path) {
  YAML::Node meta = YAML::LoadFile(yaml_path);
  if (!meta["image"] || !meta["resolution"] || !meta["origin"])
    throw TrackError("load_map: sidecar missing image/resolution/origin");

  OccupancyGrid grid;
  grid.resolution = meta["resolution"].as<double>();
  if (grid.resolution <= 0.0) throw TrackError("load_map: resolution must be positive");
  const auto origin = meta["origin"];
  grid.origin.x = origin[0].as<double>();
  grid.origin.y = origin[1].as<double>();
  grid.origin.psi = origin.size() > 2 ? origin[2].as<double>() : 0.0;

  MapThresholds thr;
  if (meta["occupied_thresh"]) thr.occupied = meta["occupied_thresh"].as<double>();
  if (meta["free_thresh"]) thr.free = meta["free_thresh"].as<double>();
  if (meta["negate"]) thr.negate = meta["negate"].as<int>() != 0;

  fs::path image_path = meta["image"].as<std::string>();
  if (image_path.is_relative()) image_path = fs::path(yaml_path).parent_path() / image_path;

  std::ifstream pgm(image_path, std::ios::binary);
  if (!pgm) throw TrackError("load_map: cannot open image " + image_path.string());
  std::string magic;
  pgm >> magic;
  if (magic != "P5") throw TrackError("load_map: image is not a binary P5 graymap");
  grid.width = read_pgm_token(pgm);
  grid.height = read_pgm_token(pgm);
  const int maxval = read_pgm_token(pgm);
  if (grid.width <= 0 || grid.height <= 0 || maxval <= 0 || maxval > 255)
    throw TrackError("load_map: bad PGM header");
  pgm.get();  // single whitespace after maxval

  std::vector<unsigned char> pixels(static_cast<std::size_t>(grid.width) * grid.height);
  pgm.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!pgm) throw TrackError("load_map: truncated PGM payload");

  grid.cells.resize(pixels.size());
  // Image rows run top-down while grid rows run bottom-up.
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      const unsigned char px = pixels[static_cast<std::size_t>(grid.height - 1 - iy) * grid.width + ix];
      const double shade = static_cast<double>(px) / maxval;
      const double occ = thr.negate ? shade : 1.0 - shade;
      Cell c = Cell::kUnknown;
      if (occ >= thr.occupied)
        c = Cell::kOccupied;
      else if (occ <= thr.free)
        c = Cell::kFree;
      grid.set(ix, iy, c);
    }
  }
  return grid;
}

void save_map(const OccupancyGrid& grid, const std::string& yaml_path,
              const std::string& pgm_path, const MapThresholds& thr) {
  if (!grid.valid()) throw TrackError("save_map: invalid grid");

  std::ofstream pgm(pgm_path, std::ios::binary);
  if (!pgm) throw TrackError("save_map: cannot write " + pgm_path);
  pgm << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  std::vector<unsigned char> pixels(static_cast<std::size_t>(grid.width) * grid.height);
  for (int iy = 0; iy < grid.height; ++iy) {
    for (int ix = 0; ix < grid.width; ++ix) {
      unsigned char px = 205;  // unknown
      switch (grid.at(ix, iy)) {
        case Cell::kFree: px = 254; break;
        case Cell::kOccupied: px = 0; break;
        case Cell::kUnknown: px = 205; break;
      }
      pixels[static_cast<std::size_t>(grid.height - 1 - iy) * grid.width + ix] = px;
    }
  }
  pgm.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));

  std::ofstream yaml(yaml_path);
  if (!yaml) throw TrackError("save_map: cannot write " + yaml_path);
  yaml << "image: " << fs::path(pgm_path).filename().string() << "\n";
  yaml << "resolution: " << grid.resolution << "\n";
  yaml << "origin: [" << grid.origin.x << ", " << grid.origin.y << ", " << grid.origin.psi
       << "]\n";
  yaml << "occupied_thresh: " << thr.occupied << "\n";
  yaml << "free_thresh: " << thr.free << "\n";
  yaml << "negate: " << (thr.negate ? 1 : 0) << "\n";
}

}  // namespace rs::track
