#include <doctest.h>

#include <cmath>

#include "racestack/common/rng.hpp"
#include "racestack/sysid/cornering.hpp"
#include "racestack/sysid/pacejka_fit.hpp"

using namespace rs;
using namespace rs::sysid;

TEST_SUITE_BEGIN("sysid");

TEST_CASE("cornering experiment: straight portion and linear region") {
  sim::SingleTrackParams params;
  CorneringConfig cfg;
  const CorneringDataset data = run_cornering_experiment(params, cfg);
  REQUIRE(data.samples.size() > 400);

  // Near-zero steering: slip angles and forces vanish.
  for (const auto& s : data.samples) {
    if (std::abs(s.delta) > 1e-3) continue;
    CHECK(std::abs(s.alpha_f) < 2e-2);
    CHECK(std::abs(s.f_yf) < 1.0);
  }

  // Small-slip region: front force linear in slip with slope ~ B*C*D.
  const double slope_expect =
      params.mu_scale * params.tire_front.B * params.tire_front.C * params.tire_front.D;
  double num = 0.0, den = 0.0;
  for (const auto& s : data.samples) {
    if (std::abs(s.alpha_f) < 0.005 || std::abs(s.alpha_f) > 0.03) continue;
    num += s.f_yf * s.alpha_f;
    den += s.alpha_f * s.alpha_f;
  }
  REQUIRE(den > 0.0);
  CHECK(num / den == doctest::Approx(slope_expect).epsilon(0.12));

  // Faster sweeps reach larger slip before instability.
  double max_alpha_3 = 0.0, max_alpha_5 = 0.0;
  for (const auto& s : data.samples) {
    if (std::abs(s.v_x - 3.0) < 0.3) max_alpha_3 = std::max(max_alpha_3, std::abs(s.alpha_f));
    if (std::abs(s.v_x - 5.0) < 0.3) max_alpha_5 = std::max(max_alpha_5, std::abs(s.alpha_f));
  }
  CHECK(max_alpha_5 >= max_alpha_3);
}

TEST_CASE("round-trip identification reproduces the force curve within 5% rms") {
  sim::SingleTrackParams params;
  const CorneringDataset data = run_cornering_experiment(params);

  for (Axle axle : {Axle::kFront, Axle::kRear}) {
    const FitResult fit = fit_pacejka(data, axle);
    const sim::PacejkaTire& truth =
        axle == Axle::kFront ? params.tire_front : params.tire_rear;

    // Curve-level agreement over the sampled slip range.
    double max_alpha = 0.0;
    for (const auto& s : data.samples)
      max_alpha = std::max(max_alpha, std::abs(axle == Axle::kFront ? s.alpha_f : s.alpha_r));

    double err2 = 0.0, ref2 = 0.0;
    for (double a = -max_alpha; a <= max_alpha; a += max_alpha / 100.0) {
      const double f_true = params.mu_scale * truth.force(a);
      const double f_fit = fit.tire.force(a);
      err2 += (f_fit - f_true) * (f_fit - f_true);
      ref2 += f_true * f_true;
    }
    CHECK(std::sqrt(err2 / ref2) < 0.05);
    // Peak force recovered within 10%.
    CHECK(fit.tire.D == doctest::Approx(params.mu_scale * truth.D).epsilon(0.10));
    // Caps respected.
    const double c_cap = axle == Axle::kFront ? 4.0 : 1.5;
    const double e_cap = axle == Axle::kFront ? 1.1 : 0.8;
    CHECK(fit.tire.C <= c_cap + 1e-9);
    CHECK(fit.tire.E <= e_cap + 1e-9);
  }
}

TEST_CASE("em outlier loop removes injected gross outliers") {
  sim::SingleTrackParams params;
  CorneringDataset data = run_cornering_experiment(params);

  // Inject 5% gross outliers at +-20 N.
  Rng rng(77);
  std::size_t injected = 0;
  for (auto& s : data.samples) {
    if (rng.uniform() < 0.05) {
      s.f_yf += rng.uniform() < 0.5 ? 20.0 : -20.0;
      ++injected;
    }
  }
  REQUIRE(injected > 10);

  const FitResult fit = fit_pacejka(data, Axle::kFront);
  // Thresholds follow 10 / 2^k.
  REQUIRE(fit.em_thresholds.size() == 3);
  CHECK(fit.em_thresholds[0] == doctest::Approx(5.0));
  CHECK(fit.em_thresholds[1] == doctest::Approx(2.5));
  CHECK(fit.em_thresholds[2] == doctest::Approx(1.25));
  // At least 90% of the injected outliers are gone.
  CHECK(fit.removed_outliers >= static_cast<std::size_t>(0.9 * injected));

  // The fit still matches the clean curve.
  double err2 = 0.0, ref2 = 0.0;
  for (double a = -0.15; a <= 0.15; a += 0.003) {
    const double f_true = params.mu_scale * params.tire_front.force(a);
    const double f_fit = fit.tire.force(a);
    err2 += (f_fit - f_true) * (f_fit - f_true);
    ref2 += f_true * f_true;
  }
  CHECK(std::sqrt(err2 / ref2) < 0.08);
}

TEST_CASE("em passes never remove samples with residual below the threshold") {
  sim::SingleTrackParams params;
  const CorneringDataset data = run_cornering_experiment(params);
  const FitResult fit = fit_pacejka(data, Axle::kRear);
  // Clean simulated data: every residual is far below 1.25 N, so nothing
  // may be removed.
  CHECK(fit.removed_outliers == 0);
  CHECK(fit.inliers == data.samples.size());
}

TEST_CASE("mirrored dataset leaves the peak factor unchanged") {
  sim::SingleTrackParams params;
  const CorneringDataset base = run_cornering_experiment(params);
  CorneringDataset mirrored = base;
  for (auto& s : mirrored.samples) {
    s.alpha_f = -s.alpha_f;
    s.alpha_r = -s.alpha_r;
    s.f_yf = -s.f_yf;
    s.f_yr = -s.f_yr;
  }
  const FitResult a = fit_pacejka(base, Axle::kFront);
  const FitResult b = fit_pacejka(mirrored, Axle::kFront);
  CHECK(a.tire.D == doctest::Approx(b.tire.D).epsilon(1e-6));
  CHECK(a.tire.B == doctest::Approx(b.tire.B).epsilon(1e-5));
}

TEST_CASE("degenerate data raises a coverage error") {
  sim::SingleTrackParams params;
  CorneringDataset tiny;
  Rng rng(5);
  for (int i = 0; i < 400; ++i) {
    CorneringSample s;
    s.alpha_f = rng.uniform(-0.01, 0.01);  // tiny slip range
    s.f_yf = 100.0 * s.alpha_f;
    tiny.samples.push_back(s);
  }
  CHECK_THROWS_AS(fit_pacejka(tiny, Axle::kFront), FitDegenerateError);
}

TEST_CASE("fit is deterministic") {
  sim::SingleTrackParams params;
  const CorneringDataset data = run_cornering_experiment(params);
  const FitResult a = fit_pacejka(data, Axle::kFront);
  const FitResult b = fit_pacejka(data, Axle::kFront);
  CHECK(a.tire.B == b.tire.B);
  CHECK(a.tire.C == b.tire.C);
  CHECK(a.tire.D == b.tire.D);
  CHECK(a.tire.E == b.tire.E);
}

TEST_SUITE_END();
