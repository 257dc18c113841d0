#pragma once
#include <stdexcept>
#include <vector>

#include "racestack/sim/vehicle.hpp"
#include "racestack/sysid/cornering.hpp"

namespace rs::sysid {

enum class Axle { kFront, kRear };

struct FitConfig {
  // Shape/curvature caps per axle.
  double c_cap_front = 4.0;
  double e_cap_front = 1.1;
  double c_cap_rear = 1.5;
  double e_cap_rear = 0.8;

  int em_passes = 3;             // outlier thresholds 10 / 2^k, k = 1..3
  double em_base = 10.0;         // N
  int max_lm_iterations = 200;
  double min_alpha_coverage = 0.04;  // rad, fit-degenerate below this
  std::size_t min_samples = 200;
};

struct FitDegenerateError : std::runtime_error {
  FitDegenerateError(std::string msg, double coverage)
      : std::runtime_error(std::move(msg)), achieved_alpha_coverage(coverage) {}
  double achieved_alpha_coverage = 0.0;
};

struct FitResult {
  sim::PacejkaTire tire;
  double rms_residual = 0.0;         // N, on the surviving inliers
  std::size_t inliers = 0;
  std::size_t removed_outliers = 0;
  std::vector<double> em_thresholds; // N, per pass
};

// Bounded nonlinear least squares of the magic formula on (slip angle,
// axle force) pairs, with three expectation-maximization passes that drop
// samples whose residual against the previous fit exceeds 10/2^k newtons.
FitResult fit_pacejka(const CorneringDataset& data, Axle axle, const FitConfig& cfg = {});

}  // namespace rs::sysid
