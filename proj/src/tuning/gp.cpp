#include "racestack/tuning/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace rs::tuning {
namespace {

constexpr double kTwoPi = 6.283185307179586;

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                               double ls) const {
  return hyper_.signal_var * std::exp(-(a - b).squaredNorm() / (2.0 * ls * ls));
}

void GaussianProcess::factorize(double ls) {
  const int n = static_cast<int>(xs_.size());
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = kernel(xs_[i], xs_[j], ls);
  k.diagonal().array() += hyper_.noise_var;
  llt_.compute(k);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("GaussianProcess: kernel factorization failed");
  alpha_ = llt_.solve(ys_);
}

double GaussianProcess::log_marginal_likelihood(double ls) const {
  const int n = static_cast<int>(xs_.size());
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = kernel(xs_[i], xs_[j], ls);
  k.diagonal().array() += hyper_.noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return -1e300;
  const Eigen::VectorXd a = llt.solve(ys_);
  double log_det = 0.0;
  for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * ys_.dot(a) - 0.5 * log_det - 0.5 * n * std::log(kTwoPi);
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("GaussianProcess::fit: need at least two points");
  xs_ = xs;

  y_mean_ = 0.0;
  for (double y : ys) y_mean_ += y;
  y_mean_ /= static_cast<double>(ys.size());
  ys_.resize(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) ys_(static_cast<Eigen::Index>(i)) = ys[i] - y_mean_;

  double var = 0.0;
  for (Eigen::Index i = 0; i < ys_.size(); ++i) var += ys_(i) * ys_(i);
  var /= static_cast<double>(ys_.size());
  hyper_.signal_var = std::max(var, 1e-8);
  hyper_.noise_var = std::max(1e-4 * hyper_.signal_var, 1e-10);

  // Golden-section on the marginal likelihood over the length-scale bounds.
  double lo = 0.05, hi = 1.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = log_marginal_likelihood(x1), f2 = log_marginal_likelihood(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = log_marginal_likelihood(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = log_marginal_likelihood(x1);
    }
  }
  hyper_.length_scale = 0.5 * (lo + hi);
  factorize(hyper_.length_scale);
  fitted_ = true;
}

void GaussianProcess::predict(const Eigen::VectorXd& x, double& mean, double& var) const {
  if (!fitted_) {
    mean = y_mean_;
    var = hyper_.signal_var;
    return;
  }
  const int n = static_cast<int>(xs_.size());
  Eigen::VectorXd kv(n);
  for (int i = 0; i < n; ++i) kv(i) = kernel(xs_[i], x, hyper_.length_scale);
  mean = y_mean_ + kv.dot(alpha_);
  const Eigen::VectorXd w = llt_.solve(kv);
  var = std::max(hyper_.signal_var + hyper_.noise_var - kv.dot(w), 1e-12);
}

double expected_improvement(double mean, double var, double best) {
  const double sd = std::sqrt(std::max(var, 0.0));
  if (sd < 1e-12) return std::max(best - mean, 0.0);
  const double z = (best - mean) / sd;
  return (best - mean) * normal_cdf(z) + sd * normal_pdf(z);
}

}  // namespace rs::tuning
