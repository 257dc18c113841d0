#include "racestack/estimation/particle_filter.hpp"

#include <algorithm>
#include <cmath>

namespace rs::estimation {

ParticleFilter::ParticleFilter(const track::OccupancyGrid& grid, const RangeLut& lut,
                               const ParticleFilterConfig& cfg, std::uint64_t seed)
    : grid_(grid), lut_(lut), cfg_(cfg), rng_(seed) {
  particles_.resize(cfg_.particle_count);
}

void ParticleFilter::initialize(const track::Pose2D& pose, double sigma_xy, double sigma_psi) {
  for (auto& p : particles_) {
    p.pose.x = pose.x + rng_.gaussian(0.0, sigma_xy);
    p.pose.y = pose.y + rng_.gaussian(0.0, sigma_xy);
    p.pose.psi = wrap_to_pi(pose.psi + rng_.gaussian(0.0, sigma_psi));
    p.weight = 1.0 / static_cast<double>(particles_.size());
  }
  diverged_ = false;
}

void ParticleFilter::motion_update(double dx, double dy, double dpsi) {
  if (particles_.empty()) return;
  const double trans = std::hypot(dx, dy);
  if (trans < 1e-12 && std::abs(dpsi) < 1e-12) return;  // parked: nothing to do

  // Travel direction relative to the heading. The body-frame increment may
  // have a genuine lateral component (tire slip); dropping it walks the
  // cloud off every corner, so the geometry always keeps it. The rot1/rot2
  // split is only trusted for noise attribution above the translation
  // threshold, where atan2 is well conditioned.
  const double dir = trans > 1e-9 ? std::atan2(dy, dx) : 0.0;
  const double rot1 = dir;
  const double rot2 = wrap_to_pi(dpsi - rot1);
  const double rot1_eff = trans >= cfg_.lam_thresh ? std::abs(rot1) : 0.0;
  const double rot2_eff = trans >= cfg_.lam_thresh ? std::abs(rot2) : std::abs(dpsi);

  // Straight-line terms scale linearly with the increment magnitudes (the
  // variance accumulated over a fixed path is then invariant to the update
  // rate); cross terms are quadratic so that high-rate updates in corners do
  // not blow the cloud up.
  const double var_rot1 = cfg_.alpha1 * rot1_eff + cfg_.alpha2 * trans * trans;
  const double var_rot2 = cfg_.alpha1 * rot2_eff + cfg_.alpha2 * trans * trans;
  const double var_trans =
      cfg_.alpha3 * trans + cfg_.alpha4 * (rot1_eff * rot1_eff + rot2_eff * rot2_eff);
  const double sd_rot1 = std::sqrt(std::max(0.0, var_rot1));
  const double sd_rot2 = std::max(std::sqrt(std::max(0.0, var_rot2)), cfg_.sigma_rot_floor);
  const double sd_trans = std::max(std::sqrt(std::max(0.0, var_trans)), cfg_.sigma_trans_floor);

  for (auto& p : particles_) {
    const double r1 = rot1 + (sd_rot1 > 0.0 ? rng_.gaussian(0.0, sd_rot1) : 0.0);
    const double tr = trans + (sd_trans > 0.0 ? rng_.gaussian(0.0, sd_trans) : 0.0);
    const double r2 = rot2 + (sd_rot2 > 0.0 ? rng_.gaussian(0.0, sd_rot2) : 0.0);
    const double heading = p.pose.psi + r1;
    p.pose.x += tr * std::cos(heading);
    p.pose.y += tr * std::sin(heading);
    // Net heading change stays dpsi regardless of the split.
    p.pose.psi = wrap_to_pi(p.pose.psi + r1 + r2);
  }
  motion_since_update_ += trans;
  rotation_since_update_ += std::abs(dpsi);
}

void ParticleFilter::sensor_update(const sim::LaserScan& scan) {
  if (particles_.empty() || scan.ranges.empty()) return;
  // A stationary car gains no information worth resampling over; repeated
  // updates would only collapse the cloud.
  if (motion_since_update_ < cfg_.update_min_trans &&
      rotation_since_update_ < cfg_.update_min_rot)
    return;
  motion_since_update_ = 0.0;
  rotation_since_update_ = 0.0;

  const double inv_two_sigma2 = 1.0 / (2.0 * cfg_.sigma_hit * cfg_.sigma_hit);
  const double uniform = cfg_.z_rand / scan.range_max;

  double total = 0.0;
  for (auto& p : particles_) {
    double log_w = 0.0;
    for (std::size_t i = 0; i < scan.ranges.size();
         i += static_cast<std::size_t>(cfg_.beam_decimation)) {
      const double expected =
          lut_.range(p.pose.x, p.pose.y, p.pose.psi + scan.beam_angle(i));
      const double err = scan.ranges[i] - expected;
      const double prob = cfg_.z_hit * std::exp(-err * err * inv_two_sigma2) + uniform;
      log_w += std::log(std::max(prob, 1e-12));
    }
    p.weight = std::exp(log_w / cfg_.squash);
    total += p.weight;
  }

  if (!(total > 0.0) || !std::isfinite(total)) {
    // Divergence: reinitialize weights uniformly and flag it.
    for (auto& p : particles_) p.weight = 1.0 / static_cast<double>(particles_.size());
    diverged_ = true;
    return;
  }
  for (auto& p : particles_) p.weight /= total;

  double sum_sq = 0.0;
  for (const auto& p : particles_) sum_sq += p.weight * p.weight;
  const double ess = 1.0 / sum_sq;
  if (ess < static_cast<double>(particles_.size()) / 2.0) low_variance_resample();
}

void ParticleFilter::low_variance_resample() {
  const std::size_t n = particles_.size();
  std::vector<Particle> out;
  out.reserve(n);
  const double step = 1.0 / static_cast<double>(n);
  double target = rng_.uniform() * step;
  double cum = particles_[0].weight;
  std::size_t i = 0;
  for (std::size_t m = 0; m < n; ++m) {
    while (cum < target && i + 1 < n) cum += particles_[++i].weight;
    out.push_back(particles_[i]);
    out.back().weight = step;
    target += step;
  }
  particles_.swap(out);
  ++resamples_;
}

void ParticleFilter::normalize() {
  double total = 0.0;
  for (const auto& p : particles_) total += p.weight;
  if (total <= 0.0) return;
  for (auto& p : particles_) p.weight /= total;
}

track::Pose2D ParticleFilter::estimate() const {
  track::Pose2D out;
  double sin_sum = 0.0, cos_sum = 0.0, wsum = 0.0;
  for (const auto& p : particles_) {
    out.x += p.weight * p.pose.x;
    out.y += p.weight * p.pose.y;
    sin_sum += p.weight * std::sin(p.pose.psi);
    cos_sum += p.weight * std::cos(p.pose.psi);
    wsum += p.weight;
  }
  if (wsum > 0.0) {
    out.x /= wsum;
    out.y /= wsum;
  }
  out.psi = std::atan2(sin_sum, cos_sum);
  return out;
}

}  // namespace rs::estimation
