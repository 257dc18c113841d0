#include "racestack/sysid/cornering.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rs::sysid {
namespace {

// One direction of the steering ramp at fixed speed; returns false when the
// sweep ended in a spin-out (samples up to that point are kept).
bool sweep(const sim::SingleTrackParams& p, const CorneringConfig& cfg, double speed,
           double direction, CorneringDataset& out) {
  sim::CarState state;
  state.v_x = speed;
  const int settle_steps = static_cast<int>(std::llround(cfg.settle_time / cfg.dt));
  const int sample_every = static_cast<int>(std::llround(1.0 / (cfg.sample_hz * cfg.dt)));
  const double ramp_total = p.delta_max / cfg.steer_rate;
  const int ramp_steps = static_cast<int>(std::llround(ramp_total / cfg.dt));

  for (int i = 0; i < settle_steps; ++i)
    state = sim::step_dynamics(state, {speed, 0.0}, cfg.dt, p);

  for (int i = 0; i < ramp_steps; ++i) {
    const double delta_des = direction * cfg.steer_rate * (i * cfg.dt);
    state = sim::step_dynamics(state, {speed, delta_des}, cfg.dt, p);

    // Spin-out: lateral state diverging from the quasi-steady branch.
    if (std::abs(state.v_y) > 0.6 * state.v_x || std::abs(state.yaw_rate) > 12.0 ||
        state.v_x < 0.5 * speed)
      return false;

    if (i % sample_every != 0) continue;
    CorneringSample s;
    s.v_x = state.v_x;
    s.yaw_rate = state.yaw_rate;
    s.a_lat = state.v_x * state.yaw_rate;
    s.delta = state.delta;
    sim::slip_angles(state, p, s.alpha_f, s.alpha_r);
    const double l = p.wheelbase();
    s.f_yf = p.m * s.a_lat * p.l_r / (l * std::cos(state.delta));
    s.f_yr = p.m * s.a_lat * p.l_f / l;
    out.samples.push_back(s);
  }
  return true;
}

}  // namespace

CorneringDataset run_cornering_experiment(const sim::SingleTrackParams& params,
                                          const CorneringConfig& cfg) {
  CorneringDataset data;
  for (double speed : cfg.speeds) {
    sweep(params, cfg, speed, +1.0, data);
    sweep(params, cfg, speed, -1.0, data);
  }
  return data;
}

void save_dataset_csv(const CorneringDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sim::SimError("save_dataset_csv: cannot write " + path);
  out << "v_x,yaw_rate,a_lat,delta,alpha_f,alpha_r,f_yf,f_yr\n";
  out.precision(12);
  for (const auto& s : data.samples)
    out << s.v_x << ',' << s.yaw_rate << ',' << s.a_lat << ',' << s.delta << ',' << s.alpha_f
        << ',' << s.alpha_r << ',' << s.f_yf << ',' << s.f_yr << '\n';
}

CorneringDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sim::SimError("load_dataset_csv: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  CorneringDataset data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    CorneringSample s;
    char comma;
    row >> s.v_x >> comma >> s.yaw_rate >> comma >> s.a_lat >> comma >> s.delta >> comma >>
        s.alpha_f >> comma >> s.alpha_r >> comma >> s.f_yf >> comma >> s.f_yr;
    data.samples.push_back(s);
  }
  return data;
}

}  // namespace rs::sysid
