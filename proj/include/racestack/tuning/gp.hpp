#pragma once
#include <Eigen/Dense>

#include <vector>

namespace rs::tuning {

// Squared-exponential GP with observation noise, shared isotropic length
// scale fitted by marginal likelihood (golden-section over the documented
// bounds). Small-n regression for the sector-scaler loop.
class GaussianProcess {
 public:
  struct Hyper {
    double length_scale = 0.2;   // in scaler units, bounded to [0.05, 1.0]
    double signal_var = 1.0;
    double noise_var = 1e-4;
  };

  void fit(const std::vector<Eigen::VectorXd>& xs, const std::vector<double>& ys);

  // Posterior mean and variance at a query point.
  void predict(const Eigen::VectorXd& x, double& mean, double& var) const;

  const Hyper& hyper() const { return hyper_; }
  bool fitted() const { return fitted_; }
  double log_marginal_likelihood(double length_scale) const;

 private:
  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double ls) const;
  void factorize(double ls);

  std::vector<Eigen::VectorXd> xs_;
  Eigen::VectorXd ys_;
  double y_mean_ = 0.0;
  Hyper hyper_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  bool fitted_ = false;
};

// Expected improvement against the incumbent best (minimization).
double expected_improvement(double mean, double var, double best);

}  // namespace rs::tuning
