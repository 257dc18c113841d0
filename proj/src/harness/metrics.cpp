#include "racestack/harness/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "racestack/track/types.hpp"

namespace rs::harness {
namespace {

using nlohmann::json;

void accumulate_latency(LatencyStats& stats, double us) {
  if (us < 0.0) return;
  if (stats.histogram.empty()) stats.histogram.assign(6, 0);
  stats.mean_us = (stats.mean_us * static_cast<double>(stats.samples) + us) /
                  static_cast<double>(stats.samples + 1);
  ++stats.samples;
  stats.max_us = std::max(stats.max_us, us);
  int bucket = 0;
  double edge = 1.0;
  while (bucket < 5 && us >= edge) {
    ++bucket;
    edge *= 10.0;
  }
  ++stats.histogram[static_cast<std::size_t>(bucket)];
}

json latency_to_json(const LatencyStats& s) {
  return json{{"mean_us", s.mean_us},
              {"max_us", s.max_us},
              {"samples", s.samples},
              {"histogram", s.histogram}};
}

}  // namespace

RunMetrics compute_metrics(const TelemetryLog& log) {
  RunMetrics m;
  const double s_max = log.meta.s_max;

  double lat_sq = 0.0;
  double vel_sq = 0.0;
  std::size_t n = 0;

  double last_lap_time = 0.0;
  bool gap_engaged = false;
  std::vector<std::pair<double, double>> gap_errors;  // (t, error)

  double opp_pos_sq = 0.0, opp_vs_sq = 0.0;
  std::size_t opp_n = 0;
  const double t_steady =
      log.records.empty() ? 0.0 : 0.25 * log.records.back().t;  // skip the catch-up transient

  for (const auto& r : log.records) {
    ++n;
    lat_sq += r.d * r.d;
    m.lateral_mean_abs += std::abs(r.d);
    m.lateral_max = std::max(m.lateral_max, std::abs(r.d));
    vel_sq += (r.v_x - r.cmd_v) * (r.v_x - r.cmd_v);

    if (r.lap_crossing) {
      ++m.lap_count;
      if (m.lap_count > 1) m.lap_times.push_back(r.t - last_lap_time);
      last_lap_time = r.t;
    }

    if (r.has_opponent && s_max > 0.0) {
      const double gap = track::wrap_s(r.opp_s - r.s, s_max);
      const double err = log.meta.gap_target - gap;
      if (!gap_engaged && std::abs(err) < 0.2) gap_engaged = true;
      // Catch-up and post-overtake phases are not trailing; only gaps within
      // the pursuit horizon count toward the gap-keeping metric.
      if (gap_engaged && gap <= 8.0) gap_errors.emplace_back(r.t, err);

      if (r.trk_valid && r.opp_in_los && !r.trk_static && r.t >= t_steady) {
        const double ds = track::cyclic_diff(r.trk_s, r.opp_s, s_max);
        const double dd = r.trk_d - r.opp_d;
        opp_pos_sq += ds * ds + dd * dd;
        opp_vs_sq += (r.trk_v_s - r.opp_v_s) * (r.trk_v_s - r.opp_v_s);
        ++opp_n;
      }
    }

    if (r.det_opportunity) {
      ++m.det_opportunities;
      if (r.det_tp > 0)
        m.det_tp += 1;  // at most one true target per scan
      else
        ++m.det_fn;
    }
    m.det_fp += r.det_fp;

    if (r.collision) {
      ++m.collisions;
      if (r.collision_offender_ego) ++m.collisions_ego_fault;
      m.crashed = true;
    }
    if (r.overtake_completed) ++m.overtakes_completed;

    accumulate_latency(m.lat_sensor, r.lat_sensor);
    accumulate_latency(m.lat_estimation, r.lat_estimation);
    accumulate_latency(m.lat_opponent, r.lat_opponent);
    accumulate_latency(m.lat_behavior, r.lat_behavior);
    accumulate_latency(m.lat_control, r.lat_control);
    accumulate_latency(m.lat_total, r.lat_total);
    if (r.lat_total >= 0.0) m.latency_present = true;
  }

  if (n > 0) {
    m.lateral_rmse = std::sqrt(lat_sq / static_cast<double>(n));
    m.lateral_mean_abs /= static_cast<double>(n);
    m.velocity_tracking_rmse = std::sqrt(vel_sq / static_cast<double>(n));
  }
  if (!m.lap_times.empty()) {
    for (double t : m.lap_times) m.mean_lap_time += t;
    m.mean_lap_time /= static_cast<double>(m.lap_times.size());
    for (double t : m.lap_times)
      m.lap_time_stddev += (t - m.mean_lap_time) * (t - m.mean_lap_time);
    m.lap_time_stddev = std::sqrt(m.lap_time_stddev / static_cast<double>(m.lap_times.size()));
  }

  m.gap_reached = gap_engaged;
  if (!gap_errors.empty()) {
    const double t_end = gap_errors.back().first;
    const double t_begin = gap_errors.front().first;
    const double steady_from = t_end - 0.25 * (t_end - t_begin);
    for (const auto& [t, err] : gap_errors) {
      m.gap_error_mean_abs += std::abs(err);
      m.gap_error_max = std::max(m.gap_error_max, std::abs(err));
      if (t >= steady_from) m.gap_error_steady_max = std::max(m.gap_error_steady_max, std::abs(err));
    }
    m.gap_error_mean_abs /= static_cast<double>(gap_errors.size());
  }

  if (m.det_opportunities > 0) {
    m.tpr = static_cast<double>(m.det_tp) / static_cast<double>(m.det_tp + m.det_fn);
    m.fdr = m.det_tp + m.det_fp > 0
                ? static_cast<double>(m.det_fp) / static_cast<double>(m.det_tp + m.det_fp)
                : 0.0;
  }
  if (opp_n > 0) {
    m.opp_pos_rmse = std::sqrt(opp_pos_sq / static_cast<double>(opp_n));
    m.opp_vs_rmse = std::sqrt(opp_vs_sq / static_cast<double>(opp_n));
  }

  m.winner_ego = log.meta.target_laps > 0 && m.lap_count > log.meta.target_laps;
  return m;
}

std::string metrics_to_json(const RunMetrics& m) {
  json j{{"lap_times", m.lap_times},
         {"lap_count", m.lap_count},
         {"mean_lap_time", m.mean_lap_time},
         {"lap_time_stddev", m.lap_time_stddev},
         {"lateral_rmse", m.lateral_rmse},
         {"lateral_mean_abs", m.lateral_mean_abs},
         {"lateral_max", m.lateral_max},
         {"velocity_tracking_rmse", m.velocity_tracking_rmse},
         {"gap_error_mean_abs", m.gap_error_mean_abs},
         {"gap_error_max", m.gap_error_max},
         {"gap_error_steady_max", m.gap_error_steady_max},
         {"gap_reached", m.gap_reached},
         {"det_opportunities", m.det_opportunities},
         {"det_tp", m.det_tp},
         {"det_fp", m.det_fp},
         {"det_fn", m.det_fn},
         {"tpr", m.tpr},
         {"fdr", m.fdr},
         {"opp_pos_rmse", m.opp_pos_rmse},
         {"opp_vs_rmse", m.opp_vs_rmse},
         {"overtakes_completed", m.overtakes_completed},
         {"collisions", m.collisions},
         {"collisions_ego_fault", m.collisions_ego_fault},
         {"crashed", m.crashed},
         {"winner_ego", m.winner_ego}};
  if (m.latency_present) {
    j["latency"] = json{{"sensor", latency_to_json(m.lat_sensor)},
                        {"estimation", latency_to_json(m.lat_estimation)},
                        {"opponent", latency_to_json(m.lat_opponent)},
                        {"behavior", latency_to_json(m.lat_behavior)},
                        {"control", latency_to_json(m.lat_control)},
                        {"total", latency_to_json(m.lat_total)}};
  }
  return j.dump(2);
}

void save_metrics_csv(const TelemetryLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("metrics: cannot write " + path);
  out << "t,lateral_error,gap,cmd_v,v_x,state\n";
  out.precision(12);
  for (const auto& r : log.records) {
    const double gap =
        r.has_opponent && log.meta.s_max > 0.0 ? track::wrap_s(r.opp_s - r.s, log.meta.s_max) : -1.0;
    out << r.t << ',' << r.d << ',' << gap << ',' << r.cmd_v << ',' << r.v_x << ',' << r.state
        << '\n';
  }
}

}  // namespace rs::harness
