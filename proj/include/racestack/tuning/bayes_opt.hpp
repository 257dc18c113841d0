#pragma once
#include <functional>
#include <vector>

#include "racestack/common/rng.hpp"
#include "racestack/tuning/gp.hpp"

namespace rs::tuning {

struct TunePoint {
  Eigen::VectorXd scalers;  // in [0, 1]^n
  double cost = 0.0;
};

struct BayesOptConfig {
  int dimensions = 7;
  int seed_points = 2;        // evaluated before the GP takes over
  int acquisition_starts = 64;
  int local_steps = 60;
  std::uint64_t seed = 1;
  // Optional incumbent configuration evaluated as the first seed.
  std::vector<double> incumbent;
};

// Sequential Bayesian optimization over sector scalers (minimization).
// Seeding: the incumbent (when given) followed by Latin-hypercube points;
// afterwards each step fits the GP and maximizes expected improvement with a
// deterministic multi-start coordinate search.
class BayesOpt {
 public:
  explicit BayesOpt(const BayesOptConfig& cfg);

  // Next configuration to evaluate.
  Eigen::VectorXd propose();

  // Records an evaluated configuration.
  void observe(const Eigen::VectorXd& scalers, double cost);

  const std::vector<TunePoint>& history() const { return history_; }
  const TunePoint& best() const;
  bool gp_healthy() const { return gp_healthy_; }

 private:
  Eigen::VectorXd latin_hypercube_point(int index, int total);
  Eigen::VectorXd maximize_ei();

  BayesOptConfig cfg_;
  Rng rng_;
  GaussianProcess gp_;
  std::vector<TunePoint> history_;
  bool gp_healthy_ = true;
};

}  // namespace rs::tuning
