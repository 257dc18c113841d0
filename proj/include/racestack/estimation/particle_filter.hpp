#pragma once
#include <vector>

#include "racestack/common/rng.hpp"
#include "racestack/estimation/range_lut.hpp"
#include "racestack/sim/lidar.hpp"
#include "racestack/track/types.hpp"

namespace rs::estimation {

struct Particle {
  track::Pose2D pose;
  double weight = 0.0;
};

struct ParticleFilterConfig {
  std::size_t particle_count = 1000;

  // Motion-model noise scales: rotation->rotation, translation->rotation,
  // translation->translation, rotation->translation variance contributions.
  double alpha1 = 0.5;
  double alpha2 = 0.01;
  double alpha3 = 0.1;
  double alpha4 = 1.0;
  double lam_thresh = 0.1;  // m, minimum translation for the rot1/rot2 split

  // Stationary guards: sensor updates are gated on minimum accumulated
  // motion so a parked car cannot resample its cloud into degeneracy, and
  // small noise floors keep heading diversity alive on straights.
  double update_min_trans = 0.01;   // m
  double update_min_rot = 0.005;    // rad
  double sigma_trans_floor = 0.005; // m per update
  double sigma_rot_floor = 0.003;   // rad per update

  // Beam sensor model (mixture weights are synthetic defaults).
  int beam_decimation = 18;
  double sigma_hit = 0.10;  // m
  double z_hit = 0.80;
  double z_rand = 0.20;
  double squash = 1.5;      // inverse power applied to the joint likelihood
};

// Monte-Carlo localization against a known map, with expected ranges served
// by the precomputed RangeLut. Single-owner mutable state.
class ParticleFilter {
 public:
  ParticleFilter(const track::OccupancyGrid& grid, const RangeLut& lut,
                 const ParticleFilterConfig& cfg, std::uint64_t seed);

  // Scatters particles around an initial pose guess.
  void initialize(const track::Pose2D& pose, double sigma_xy = 0.3, double sigma_psi = 0.2);

  // Composes the body-frame odometry increment onto every particle with
  // sampled noise.
  void motion_update(double dx, double dy, double dpsi);

  // Beam-model weight update on a decimated beam subset; resamples when the
  // effective sample size drops below half the particle count.
  void sensor_update(const sim::LaserScan& scan);

  track::Pose2D estimate() const;

  const std::vector<Particle>& particles() const { return particles_; }
  bool diverged() const { return diverged_; }  // all-zero likelihood happened
  int resample_count() const { return resamples_; }

 private:
  void normalize();
  void low_variance_resample();

  const track::OccupancyGrid& grid_;
  const RangeLut& lut_;
  ParticleFilterConfig cfg_;
  Rng rng_;
  std::vector<Particle> particles_;
  bool diverged_ = false;
  int resamples_ = 0;
  double motion_since_update_ = 1e9;  // first scan always updates
  double rotation_since_update_ = 1e9;
};

}  // namespace rs::estimation
