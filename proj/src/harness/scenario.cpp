#include "racestack/harness/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>

namespace rs::harness {
namespace {

ControllerKind controller_from(const std::string& name) {
  if (name == "map") return ControllerKind::kMap;
  if (name == "pp") return ControllerKind::kPurePursuit;
  if (name == "ftg") return ControllerKind::kFtg;
  throw std::invalid_argument("scenario: unknown controller '" + name + "'");
}

const char* controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kMap: return "map";
    case ControllerKind::kPurePursuit: return "pp";
    case ControllerKind::kFtg: return "ftg";
  }
  return "map";
}

LocalizationKind localization_from(const std::string& name) {
  if (name == "ground_truth") return LocalizationKind::kGroundTruth;
  if (name == "gt_noisy") return LocalizationKind::kGroundTruthNoisy;
  if (name == "mcl") return LocalizationKind::kMcl;
  throw std::invalid_argument("scenario: unknown localization '" + name + "'");
}

const char* localization_name(LocalizationKind kind) {
  switch (kind) {
    case LocalizationKind::kGroundTruth: return "ground_truth";
    case LocalizationKind::kGroundTruthNoisy: return "gt_noisy";
    case LocalizationKind::kMcl: return "mcl";
  }
  return "ground_truth";
}

OpponentKind opponent_from(const std::string& name) {
  if (name == "none") return OpponentKind::kNone;
  if (name == "raceline") return OpponentKind::kRaceline;
  if (name == "altered") return OpponentKind::kAlteredRaceline;
  if (name == "ftg") return OpponentKind::kFtg;
  if (name == "scripted") return OpponentKind::kScripted;
  throw std::invalid_argument("scenario: unknown opponent type '" + name + "'");
}

const char* opponent_name(OpponentKind kind) {
  switch (kind) {
    case OpponentKind::kNone: return "none";
    case OpponentKind::kRaceline: return "raceline";
    case OpponentKind::kAlteredRaceline: return "altered";
    case OpponentKind::kFtg: return "ftg";
    case OpponentKind::kScripted: return "scripted";
  }
  return "none";
}

}  // namespace

Scenario load_scenario_yaml(const std::string& path) {
  YAML::Node root = YAML::LoadFile(path);
  Scenario sc;
  if (!root["map"] || !root["raceline"])
    throw std::invalid_argument("scenario: map and raceline are required");
  sc.map_yaml = root["map"].as<std::string>();
  sc.raceline_csv = root["raceline"].as<std::string>();
  if (root["seed"]) sc.seed = root["seed"].as<std::uint64_t>();
  if (root["duration"]) sc.duration = root["duration"].as<double>();
  if (root["laps"]) sc.laps = root["laps"].as<int>();
  if (root["detection_noise_sigma"])
    sc.detection_noise_sigma = root["detection_noise_sigma"].as<double>();
  if (root["latency"]) sc.latency_enabled = root["latency"].as<bool>();

  if (const auto v = root["vehicle"]) {
    auto& p = sc.vehicle;
    if (v["m"]) p.m = v["m"].as<double>();
    if (v["l_f"]) p.l_f = v["l_f"].as<double>();
    if (v["l_r"]) p.l_r = v["l_r"].as<double>();
    if (v["h_cg"]) p.h_cg = v["h_cg"].as<double>();
    if (v["I_zz"]) p.I_zz = v["I_zz"].as<double>();
    if (v["mu_scale"]) p.mu_scale = v["mu_scale"].as<double>();
    if (v["delta_max"]) p.delta_max = v["delta_max"].as<double>();
    if (v["a_long_max"]) p.a_long_max = v["a_long_max"].as<double>();
    auto tire = [](const YAML::Node& n, sim::PacejkaTire& t) {
      if (n["B"]) t.B = n["B"].as<double>();
      if (n["C"]) t.C = n["C"].as<double>();
      if (n["D"]) t.D = n["D"].as<double>();
      if (n["E"]) t.E = n["E"].as<double>();
    };
    if (v["tire_front"]) tire(v["tire_front"], p.tire_front);
    if (v["tire_rear"]) tire(v["tire_rear"], p.tire_rear);
  }

  if (const auto n = root["noise"]) {
    if (n["enabled"]) sc.noise.enabled = n["enabled"].as<bool>();
    if (n["slip"])
      sc.slip = n["slip"].as<std::string>() == "low_grip" ? sim::SlipLevel::kLowGrip
                                                          : sim::SlipLevel::kHighGrip;
    sc.noise = sim::SensorNoise::for_level(sc.slip);
    if (n["enabled"]) sc.noise.enabled = n["enabled"].as<bool>();
    if (n["imu_sigma_a"]) sc.noise.imu_sigma_a = n["imu_sigma_a"].as<double>();
    if (n["imu_sigma_gyro"]) sc.noise.imu_sigma_gyro = n["imu_sigma_gyro"].as<double>();
    if (n["imu_sigma_yaw"]) sc.noise.imu_sigma_yaw = n["imu_sigma_yaw"].as<double>();
    if (n["odom_sigma_v"]) sc.noise.odom_sigma_v = n["odom_sigma_v"].as<double>();
  }
  if (const auto l = root["lidar"]) {
    if (l["beams"]) sc.lidar.beams = l["beams"].as<std::size_t>();
    if (l["sigma"]) sc.lidar.sigma_range = l["sigma"].as<double>();
  }

  if (const auto e = root["ego"]) {
    if (e["controller"]) sc.ego.controller = controller_from(e["controller"].as<std::string>());
    if (e["localization"])
      sc.ego.localization = localization_from(e["localization"].as<std::string>());
    if (e["perception"]) sc.ego.perception = e["perception"].as<bool>();
    if (e["sector_scaler"]) sc.ego.sector_scaler = e["sector_scaler"].as<double>();
    if (e["sectors_file"]) sc.ego.sectors_file = e["sectors_file"].as<std::string>();
    if (e["trailing_gap"]) sc.ego.longitudinal.gap_target = e["trailing_gap"].as<double>();
    if (e["lookahead_m"]) sc.ego.lateral.m = e["lookahead_m"].as<double>();
    if (e["lookahead_q"]) sc.ego.lateral.q = e["lookahead_q"].as<double>();
    if (e["boundary_inflation"])
      sc.ego.detection.boundary_inflation = e["boundary_inflation"].as<double>();
    if (e["min_obs_size"]) sc.ego.detection.min_obs_size = e["min_obs_size"].as<std::size_t>();
    if (e["particles"]) sc.ego.mcl.particle_count = e["particles"].as<std::size_t>();
  }

  if (const auto o = root["opponent"]) {
    if (o["type"]) sc.opponent.kind = opponent_from(o["type"].as<std::string>());
    if (o["scaler"]) sc.opponent.scaler = o["scaler"].as<double>();
    if (o["speed"]) sc.opponent.speed = o["speed"].as<double>();
    if (o["raceline"]) sc.opponent.raceline = o["raceline"].as<std::string>();
    if (o["start_s"]) sc.opponent.start_s = o["start_s"].as<double>();
  }
  return sc;
}

void save_scenario_yaml(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("scenario: cannot write " + path);
  out << "map: " << sc.map_yaml << "\n";
  out << "raceline: " << sc.raceline_csv << "\n";
  out << "seed: " << sc.seed << "\n";
  out << "duration: " << sc.duration << "\n";
  out << "laps: " << sc.laps << "\n";
  out << "detection_noise_sigma: " << sc.detection_noise_sigma << "\n";
  out << "latency: " << (sc.latency_enabled ? "true" : "false") << "\n";
  out << "noise:\n  enabled: " << (sc.noise.enabled ? "true" : "false") << "\n";
  out << "  slip: " << (sc.slip == sim::SlipLevel::kLowGrip ? "low_grip" : "high_grip") << "\n";
  out << "lidar:\n  beams: " << sc.lidar.beams << "\n  sigma: " << sc.lidar.sigma_range << "\n";
  out << "ego:\n";
  out << "  controller: " << controller_name(sc.ego.controller) << "\n";
  out << "  localization: " << localization_name(sc.ego.localization) << "\n";
  out << "  perception: " << (sc.ego.perception ? "true" : "false") << "\n";
  out << "  sector_scaler: " << sc.ego.sector_scaler << "\n";
  if (sc.ego.sectors_file) out << "  sectors_file: " << *sc.ego.sectors_file << "\n";
  out << "  trailing_gap: " << sc.ego.longitudinal.gap_target << "\n";
  out << "opponent:\n";
  out << "  type: " << opponent_name(sc.opponent.kind) << "\n";
  out << "  scaler: " << sc.opponent.scaler << "\n";
  out << "  speed: " << sc.opponent.speed << "\n";
  if (!sc.opponent.raceline.empty()) out << "  raceline: " << sc.opponent.raceline << "\n";
  out << "  start_s: " << sc.opponent.start_s << "\n";
}

}  // namespace rs::harness
