#include "racestack/tuning/bayes_opt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rs::tuning {

BayesOpt::BayesOpt(const BayesOptConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
  if (cfg_.dimensions < 1) throw std::invalid_argument("BayesOpt: dimensions must be positive");
}

const TunePoint& BayesOpt::best() const {
  if (history_.empty()) throw std::runtime_error("BayesOpt: no evaluations yet");
  std::size_t best = 0;
  for (std::size_t i = 1; i < history_.size(); ++i)
    if (history_[i].cost < history_[best].cost) best = i;
  return history_[best];
}

Eigen::VectorXd BayesOpt::latin_hypercube_point(int index, int total) {
  // Stratified per-dimension slots with a deterministic shuffle.
  Eigen::VectorXd x(cfg_.dimensions);
  for (int d = 0; d < cfg_.dimensions; ++d) {
    const int slot = static_cast<int>((index + rng_.uniform_index(static_cast<std::uint64_t>(total)))) % total;
    x(d) = (static_cast<double>(slot) + rng_.uniform()) / static_cast<double>(total);
  }
  return x;
}

Eigen::VectorXd BayesOpt::propose() {
  const int n_seen = static_cast<int>(history_.size());

  // Seeding phase.
  if (n_seen < cfg_.seed_points) {
    if (n_seen == 0 && !cfg_.incumbent.empty()) {
      Eigen::VectorXd x(cfg_.dimensions);
      for (int d = 0; d < cfg_.dimensions; ++d)
        x(d) = std::clamp(cfg_.incumbent[static_cast<std::size_t>(d) % cfg_.incumbent.size()],
                          0.0, 1.0);
      return x;
    }
    return latin_hypercube_point(n_seen, cfg_.seed_points);
  }

  // Model phase: fit the GP; on failure fall back to a random point.
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;
  for (const auto& p : history_) {
    xs.push_back(p.scalers);
    ys.push_back(p.cost);
  }
  try {
    gp_.fit(xs, ys);
    gp_healthy_ = true;
  } catch (const std::exception&) {
    gp_healthy_ = false;
    Eigen::VectorXd x(cfg_.dimensions);
    for (int d = 0; d < cfg_.dimensions; ++d) x(d) = rng_.uniform();
    return x;
  }
  return maximize_ei();
}

Eigen::VectorXd BayesOpt::maximize_ei() {
  const double best_cost = best().cost;

  auto ei_at = [&](const Eigen::VectorXd& x) {
    double mean = 0.0, var = 0.0;
    gp_.predict(x, mean, var);
    return expected_improvement(mean, var, best_cost);
  };

  Eigen::VectorXd best_x(cfg_.dimensions);
  double best_ei = -1.0;
  for (int start = 0; start < cfg_.acquisition_starts; ++start) {
    Eigen::VectorXd x(cfg_.dimensions);
    for (int d = 0; d < cfg_.dimensions; ++d) x(d) = rng_.uniform();

    // Coordinate pattern search with a shrinking step.
    double step = 0.25;
    double current = ei_at(x);
    for (int it = 0; it < cfg_.local_steps; ++it) {
      bool improved = false;
      for (int d = 0; d < cfg_.dimensions; ++d) {
        for (double dir : {+1.0, -1.0}) {
          Eigen::VectorXd trial = x;
          trial(d) = std::clamp(trial(d) + dir * step, 0.0, 1.0);
          const double value = ei_at(trial);
          if (value > current) {
            current = value;
            x = trial;
            improved = true;
          }
        }
      }
      if (!improved) {
        step /= 2.0;
        if (step < 1e-3) break;
      }
    }
    if (current > best_ei) {
      best_ei = current;
      best_x = x;
    }
  }
  return best_x;
}

void BayesOpt::observe(const Eigen::VectorXd& scalers, double cost) {
  if (!std::isfinite(cost)) throw std::invalid_argument("BayesOpt::observe: non-finite cost");
  history_.push_back({scalers, cost});
}

}  // namespace rs::tuning
