#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qreduce/layersim.hpp"

using namespace qreduce;

namespace {

constexpr double pi = std::numbers::pi;

LayerConfig quick(std::vector<double> eps, int ntrans = 64) {
  LayerConfig cfg;
  cfg.eps = std::move(eps);
  cfg.n_transverse = ntrans;
  cfg.m_max = 2;
  return cfg;
}

}  // namespace

TEST_CASE("discrete transverse energies of the flat layer") {
  const auto cfg = quick({0.1});
  for (double eps : {0.1, 0.03}) {
    // N interior nodes between walls at +-eps/2: (1 - cos(j pi / (N + 1))) / h^2
    const double h = eps / (cfg.n_transverse + 1);
    for (int j = 1; j <= 2; ++j) {
      const double expected = (1 - std::cos(j * pi / (cfg.n_transverse + 1))) / (h * h);
      CHECK(transverse_ground_energy(eps, cfg, {}, j - 1) == doctest::Approx(expected).epsilon(1e-11));
    }
  }
  auto harmonic = quick({0.1}, 128);
  harmonic.confinement = Confinement::harmonic;
  CHECK(transverse_ground_energy(0.1, harmonic, {}) == doctest::Approx(0.5 / 0.01).epsilon(1e-3));
  CHECK(transverse_ground_energy(0.1, harmonic, PhysicsParams{0.5}) == doctest::Approx(0.125 / 0.01).epsilon(1e-3));
}

TEST_CASE("extrapolation fit") {
  const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> energy;
  for (double e : eps) energy.push_back(-0.125 + 0.3 * e - 2.0 * e * e);
  const auto fit = band_extrapolate(eps, energy);
  CHECK(fit.limit == doctest::Approx(-0.125).epsilon(1e-12));
  CHECK(fit.c1 == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(fit.c2 == doctest::Approx(-2.0).epsilon(1e-10));
  CHECK(fit.residual < 1e-14);
  const std::vector<double> two{0.1, 0.05, 0.1};
  CHECK_THROWS_AS(band_extrapolate(two, std::vector<double>{1, 2, 3}), UsageError);
}

TEST_CASE("flat strip: renormalized bands are the free tangential levels") {
  const double length = 2 * pi * 1.5;
  auto cfg = quick({0.1, 0.05, 0.025});
  const auto result = strip_band_spectrum(length, cfg);
  for (const auto& s : result.samples) {
    const double kappa = s.mode / 1.5;
    CHECK(s.renormalized == doctest::Approx(kappa * kappa / 2).epsilon(1e-8).scale(1.0));
  }
  CHECK(result.limit_for(2).limit == doctest::Approx(2.0 / 2.25).epsilon(1e-8));
}

TEST_CASE("circle layer approaches the reduced spectrum") {
  const auto result = circle_band_spectrum(1.0, quick({0.1, 0.05, 0.025}));
  CHECK(result.first_transverse_band);
  CHECK(result.samples.size() == 9);
  CHECK(result.samples_for(1).size() == 3);
  CHECK(result.limit_for(0).limit == doctest::Approx(-0.125).epsilon(0.01));
  CHECK(result.limit_for(2).limit - result.limit_for(0).limit == doctest::Approx(2.0).epsilon(0.005));
  CHECK(result.limit_for(0).observed_order == doctest::Approx(2.0).epsilon(0.1));
  CHECK(result.perp_continuum[0] == doctest::Approx(pi * pi / (2 * 0.01)));
  for (const auto& s : result.samples_for(0)) CHECK(s.raw < s.perp);
}

TEST_CASE("latitude layer feels the sphere's embedding") {
  auto cfg = quick({0.1, 0.05, 0.025});
  cfg.m_max = 0;
  const auto result = latitude_band_spectrum(1.0, pi / 3, cfg);
  CHECK(result.limit_for(0).limit == doctest::Approx(-7.0 / 24).epsilon(0.02));
}

TEST_CASE("decoupled modes reproduce the 2D solve on the same angular grid") {
  LayerConfig cfg;
  cfg.eps = {0.1};
  cfg.extrapolate = false;
  cfg.n_transverse = 32;
  cfg.n_tangential = 32;
  cfg.bands = 5;
  cfg.m_max = 2;
  cfg.angular_grid = 32;
  const auto full = curve_band_spectrum_2d(CurveSpec::circle(1.0), cfg);
  const auto modal = circle_band_spectrum(1.0, cfg);
  // bands 0, (1, 2), (3, 4) are m = 0, 1, 2
  const int mode_of_band[] = {0, 1, 1, 2, 2};
  for (int b = 0; b < 5; ++b) {
    CHECK(full.samples_for(b)[0].raw ==
          doctest::Approx(modal.samples_for(mode_of_band[b])[0].raw).epsilon(1e-6));
  }
}

TEST_CASE("layer simulations reject bad input") {
  CHECK_THROWS_AS(circle_band_spectrum(0.1, quick({0.1, 0.05, 0.025})), BreakdownError);
  CHECK_THROWS_AS(latitude_band_spectrum(1.0, 0.02, quick({0.1, 0.05, 0.025})), DegenerateError);
  CHECK_THROWS_AS(curve_band_spectrum_2d(CurveSpec::parabola(1.0), quick({0.1, 0.05, 0.025})), UsageError);
  auto big = quick({0.1, 0.05, 0.025}, 64);
  big.n_tangential = 128;
  CHECK_THROWS_AS(curve_band_spectrum_2d(CurveSpec::ellipse(1.5, 1.0), big), UsageError);
  CHECK_THROWS_AS(circle_band_spectrum(1.0, quick({})), UsageError);
  CHECK_THROWS_AS(circle_band_spectrum(1.0, quick({0.1, -0.05, 0.025})), UsageError);
  CHECK_THROWS_AS(circle_band_spectrum(1.0, quick({0.1, 0.05})), UsageError);
  CHECK(parse_confinement("harmonic") == Confinement::harmonic);
  CHECK_THROWS_AS(parse_confinement("box"), UsageError);
}
