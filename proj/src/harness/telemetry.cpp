#include "racestack/harness/telemetry.hpp"

#include <json.hpp>

#include <fstream>

namespace rs::harness {

using nlohmann::json;

namespace {

json to_json(const TelemetryRecord& r) {
  return json{{"t", r.t},
              {"x", r.x},
              {"y", r.y},
              {"psi", r.psi},
              {"v_x", r.v_x},
              {"v_y", r.v_y},
              {"yaw_rate", r.yaw_rate},
              {"s", r.s},
              {"d", r.d},
              {"est_x", r.est_x},
              {"est_y", r.est_y},
              {"est_psi", r.est_psi},
              {"est_v_x", r.est_v_x},
              {"est_s", r.est_s},
              {"est_d", r.est_d},
              {"est_stale", r.est_stale},
              {"cmd_v", r.cmd_v},
              {"cmd_delta", r.cmd_delta},
              {"state", r.state},
              {"has_opp", r.has_opponent},
              {"opp_s", r.opp_s},
              {"opp_d", r.opp_d},
              {"opp_v_s", r.opp_v_s},
              {"opp_los", r.opp_in_los},
              {"trk_valid", r.trk_valid},
              {"trk_s", r.trk_s},
              {"trk_d", r.trk_d},
              {"trk_v_s", r.trk_v_s},
              {"trk_static", r.trk_static},
              {"det", r.detections},
              {"det_tp", r.det_tp},
              {"det_fp", r.det_fp},
              {"det_opp", r.det_opportunity},
              {"lap", r.lap_crossing},
              {"coll", r.collision},
              {"coll_ego", r.collision_offender_ego},
              {"ot_done", r.overtake_completed},
              {"lat_sen", r.lat_sensor},
              {"lat_est", r.lat_estimation},
              {"lat_opp", r.lat_opponent},
              {"lat_beh", r.lat_behavior},
              {"lat_ctl", r.lat_control},
              {"lat_tot", r.lat_total}};
}

TelemetryRecord record_from(const json& j) {
  TelemetryRecord r;
  r.t = j.at("t");
  r.x = j.at("x");
  r.y = j.at("y");
  r.psi = j.at("psi");
  r.v_x = j.at("v_x");
  r.v_y = j.at("v_y");
  r.yaw_rate = j.at("yaw_rate");
  r.s = j.at("s");
  r.d = j.at("d");
  r.est_x = j.at("est_x");
  r.est_y = j.at("est_y");
  r.est_psi = j.at("est_psi");
  r.est_v_x = j.at("est_v_x");
  r.est_s = j.at("est_s");
  r.est_d = j.at("est_d");
  r.est_stale = j.at("est_stale");
  r.cmd_v = j.at("cmd_v");
  r.cmd_delta = j.at("cmd_delta");
  r.state = j.at("state");
  r.has_opponent = j.at("has_opp");
  r.opp_s = j.at("opp_s");
  r.opp_d = j.at("opp_d");
  r.opp_v_s = j.at("opp_v_s");
  r.opp_in_los = j.at("opp_los");
  r.trk_valid = j.at("trk_valid");
  r.trk_s = j.at("trk_s");
  r.trk_d = j.at("trk_d");
  r.trk_v_s = j.at("trk_v_s");
  r.trk_static = j.at("trk_static");
  r.detections = j.at("det");
  r.det_tp = j.at("det_tp");
  r.det_fp = j.at("det_fp");
  r.det_opportunity = j.at("det_opp");
  r.lap_crossing = j.at("lap");
  r.collision = j.at("coll");
  r.collision_offender_ego = j.at("coll_ego");
  r.overtake_completed = j.at("ot_done");
  r.lat_sensor = j.at("lat_sen");
  r.lat_estimation = j.at("lat_est");
  r.lat_opponent = j.at("lat_opp");
  r.lat_behavior = j.at("lat_beh");
  r.lat_control = j.at("lat_ctl");
  r.lat_total = j.at("lat_tot");
  return r;
}

}  // namespace

std::string record_to_json(const TelemetryRecord& r) { return to_json(r).dump(); }

std::string meta_to_json(const TelemetryMeta& m) {
  return json{{"type", "meta"},     {"s_max", m.s_max},   {"gap_target", m.gap_target},
              {"car_length", m.car_length}, {"target_laps", m.target_laps},
              {"seed", m.seed},     {"mode", m.mode}}
      .dump();
}

void save_telemetry(const TelemetryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("telemetry: cannot write " + path);
  out << meta_to_json(log.meta) << '\n';
  for (const auto& r : log.records) out << record_to_json(r) << '\n';
}

TelemetryLog load_telemetry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("telemetry: cannot open " + path);
  TelemetryLog log;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (j.contains("type") && j.at("type") == "meta") {
      log.meta.s_max = j.at("s_max");
      log.meta.gap_target = j.at("gap_target");
      log.meta.car_length = j.at("car_length");
      log.meta.target_laps = j.at("target_laps");
      log.meta.seed = j.at("seed");
      log.meta.mode = j.at("mode");
      have_meta = true;
    } else {
      log.records.push_back(record_from(j));
    }
  }
  if (!have_meta) throw std::runtime_error("telemetry: missing meta line in " + path);
  return log;
}

}  // namespace rs::harness
