#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tdho/estimates.hpp"
#include "tdho/errors.hpp"
#include "tdho/spectral.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace tdho;

namespace {

OscillatorModel model_free_inside() {
  return OscillatorModel::make(1.0, 3.0 / 16.0, 1.0, InnerProfile::constant(0.0));
}

WaveFunction drifting_state(const Grid& g, double p0, double width) {
  return make_gaussian(g, {0.0, 0.0}, {p0, 0.0}, width);
}

/// Lorentzian-envelope wave with |psi(x)| ~ w/|x| tails; the algebraic decay
/// keeps mass in every moving window where a Gaussian would underflow.
WaveFunction power_tail_state(const Grid& g, double width, double p0) {
  WaveFunction psi = WaveFunction::zero(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.position(i);
    psi.amp[i] =
        std::polar(1.0 / std::sqrt(1.0 + x * x / (width * width)), p0 * x);
  }
  const double scale = 1.0 / norm(psi);
  for (auto& a : psi.amp) a *= scale;
  return psi;
}

std::vector<double> doubling_times(double first, int count) {
  std::vector<double> times(count);
  double t = first;
  for (int i = 0; i < count; ++i, t *= 2.0) times[i] = t;
  return times;
}

}  // namespace

TEST_CASE("estimate config stock derivations") {
  const auto model = model_free_inside();
  const auto cfg = EstimateConfig::make(model);

  // theta = 2 sqrt(R1) / (m (1 - 2 lambda)) = 2 * 4 / 0.5
  CHECK(cfg.theta == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(cfg.eps4 == doctest::Approx(cfg.eps3 + cfg.eps).epsilon(1e-12));

  // eps5 defaults to the midpoint of (3 eps + eps2, kappa1/(m(1-2l) sqrt(R1)))
  const double lo = 3.0 * cfg.eps + cfg.eps2;
  const double hi = cfg.kappa1 / (model.m * (1.0 - 2.0 * model.lambda) *
                                  std::sqrt(cfg.R1));
  CHECK(lo == doctest::Approx(0.016).epsilon(1e-12));
  CHECK(hi == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(cfg.eps5 == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-12));

  // geometric grid: starts at r0, ends exactly at the default 2^10 r0
  REQUIRE(!cfg.times.empty());
  CHECK(cfg.times.front() == doctest::Approx(model.r0).epsilon(1e-14));
  CHECK(cfg.times.back() == 1024.0);
  CHECK(cfg.times.size() == 41);
  const double ratio = std::pow(2.0, 0.25);
  for (size_t i = 1; i + 1 < cfg.times.size(); ++i)
    CHECK(cfg.times[i] / cfg.times[i - 1] ==
          doctest::Approx(ratio).epsilon(1e-12));

  const auto coarse = EstimateConfig::make(model, 512.0, 2);
  CHECK(coarse.times.size() == 19);
  CHECK(coarse.times.back() == 512.0);

  // validate() accepts what finalize() produced
  CHECK_NOTHROW(cfg.validate(model));
}

TEST_CASE("estimate config validation rejects inconsistent blocks") {
  const auto model = model_free_inside();
  const auto good = EstimateConfig::make(model);

  auto tamper = [&](auto&& mutate) {
    EstimateConfig cfg = good;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(model), ValidationError);
  };

  tamper([](EstimateConfig& c) { c.eps = 0.0; });
  tamper([](EstimateConfig& c) { c.eps2 = 0.5 * c.eps; });
  tamper([](EstimateConfig& c) { c.eps3 = 1.5 * c.eps; });
  tamper([](EstimateConfig& c) { c.eta0 = c.eps; });
  tamper([](EstimateConfig& c) { c.eps4 = c.eps3 + 2.0 * c.eps; });
  tamper([](EstimateConfig& c) { c.eps5 = 0.05; });  // above the window
  tamper([](EstimateConfig& c) { c.theta = 5.0; });  // derived field edited
  tamper([](EstimateConfig& c) { c.times.clear(); });
  tamper([](EstimateConfig& c) { c.times.front() = 0.5; });
  tamper([](EstimateConfig& c) { std::swap(c.times[3], c.times[4]); });

  CHECK_THROWS_AS(EstimateConfig::make(model, 0.5), ValidationError);
  CHECK_THROWS_AS(EstimateConfig::make(model, 64.0, 0), ValidationError);

  // a wide band shrinks the eps5 window below the stock transition widths
  EstimateConfig wide = good;
  wide.R1 = 100.0;
  wide.eps5 = 0.0;
  CHECK_THROWS_AS(wide.finalize(model), ValidationError);
}

TEST_CASE("loglog slope fit recovers exact power laws") {
  std::vector<double> times, values;
  for (int i = 0; i < 10; ++i) {
    const double t = std::pow(10.0, 0.3 * i);
    times.push_back(t);
    values.push_back(3.0 * std::pow(t, -1.7));
  }
  CHECK(fit_loglog_slope(times, values) ==
        doctest::Approx(-1.7).epsilon(1e-12));

  // samples at or below the floor are excluded, not fitted
  auto noisy_t = times;
  auto noisy_v = values;
  noisy_t.push_back(1e9);
  noisy_v.push_back(1e-14);
  CHECK(fit_loglog_slope(noisy_t, noisy_v) ==
        doctest::Approx(-1.7).epsilon(1e-12));

  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0, 3.0}, {1.0, 0.5, 0.25}),
                  FitError);
  CHECK_THROWS_AS(
      fit_loglog_slope({2.0, 2.0, 2.0, 2.0}, {1.0, 1.0, 1.0, 1.0}), FitError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0}), ValidationError);
}

TEST_CASE("fast-region functional stays numerically empty for a slow state") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);
  const auto psi = drifting_state(g, 1.0, 4.0);
  const auto cfg = EstimateConfig::make(model);

  const auto series = large_velocity_integral(model, nullptr, psi, cfg);
  REQUIRE(series.times == cfg.times);
  REQUIRE(series.integrand.size() == cfg.times.size());
  for (double f : series.integrand) {
    CHECK(f >= 0.0);
    CHECK(f <= 1e-6);
  }
  for (size_t i = 1; i < series.partial.size(); ++i)
    CHECK(series.partial[i] >= series.partial[i - 1]);
  CHECK(series.bound_estimate == series.partial.back());
  CHECK(series.bound_estimate <= 1e-5);
}

TEST_CASE("fast-region engine path matches the exact free flow") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);
  const auto psi = drifting_state(g, 1.0, 4.0);
  const auto cfg = EstimateConfig::make(model, 16.0, 4);

  const auto free_path = large_velocity_integral(model, nullptr, psi, cfg);
  const auto silent = PotentialSpec::static_bump(0.0, 2.0, model.lambda);
  const auto engine =
      large_velocity_integral(model, &silent, psi, cfg, {0.25, 1e-6, 8});

  REQUIRE(engine.integrand.size() == free_path.integrand.size());
  for (size_t i = 0; i < engine.integrand.size(); ++i)
    CHECK(std::abs(engine.integrand[i] - free_path.integrand[i]) <= 1e-9);
  CHECK(std::abs(engine.bound_estimate - free_path.bound_estimate) <= 1e-9);
}

TEST_CASE("fast-region functional: phase invariance and quadratic scaling") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);
  const auto psi = drifting_state(g, 1.0, 4.0);
  const auto cfg = EstimateConfig::make(model, 16.0, 4);

  const auto base = large_velocity_integral(model, nullptr, psi, cfg);
  const auto rotated = large_velocity_integral(
      model, nullptr, std::polar(1.0, 0.9) * psi, cfg);
  const auto halved =
      large_velocity_integral(model, nullptr, cdouble(0.5, 0.0) * psi, cfg);

  for (size_t i = 0; i < base.integrand.size(); ++i) {
    CHECK(std::abs(rotated.integrand[i] - base.integrand[i]) <=
          1e-15 + 1e-10 * base.integrand[i]);
    CHECK(std::abs(halved.integrand[i] - 0.25 * base.integrand[i]) <=
          1e-15 + 1e-10 * base.integrand[i]);
  }
}

TEST_CASE("intermediate-region functional separates comoving from mismatched packets") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 64.0);

  // wide band (R1 = 100) so both carriers sit in its flat part; the stock
  // transition widths would empty the eps5 window at this R1
  auto cfg = EstimateConfig::make(model, 16.0, 4);
  cfg.R1 = 100.0;
  cfg.eps = 5e-4;
  cfg.eps2 = 2e-3;
  cfg.eps3 = 5e-3;
  cfg.eps5 = 0.0;
  cfg.finalize(model);

  // x0 = 3, p = 1.5 rides the drift line p = m(1-2l) x / t^(1-2l) exactly;
  // p = 4.5 on the same ray misses it by 3/sqrt(t)
  const auto matched = make_gaussian(g, {3.0, 0.0}, {1.5, 0.0}, 2.0);
  const auto mismatched = make_gaussian(g, {3.0, 0.0}, {4.5, 0.0}, 2.0);

  const auto on_ray = middle_velocity_integral(model, nullptr, matched, cfg);
  const auto off_ray =
      middle_velocity_integral(model, nullptr, mismatched, cfg);

  REQUIRE(on_ray.integrand.size() == off_ray.integrand.size());
  for (size_t i = 0; i < on_ray.integrand.size(); ++i)
    CHECK(off_ray.integrand[i] >= 10.0 * on_ray.integrand[i]);
  CHECK(off_ray.bound_estimate >= 10.0 * on_ray.bound_estimate);
  for (size_t i = 1; i < on_ray.partial.size(); ++i)
    CHECK(on_ray.partial[i] >= on_ray.partial[i - 1]);
}

TEST_CASE("slow-region profile verdicts") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);

  const auto cfg_short = EstimateConfig::make(model, 16.0, 4);
  const auto profile_zero = minimal_velocity_profile(
      model, nullptr, WaveFunction::zero(g), cfg_short);
  for (double v : profile_zero.values) CHECK(v == 0.0);
  CHECK(!profile_zero.decaying);

  const auto cfg = EstimateConfig::make(model, 256.0, 4);
  const auto moving = drifting_state(g, 1.0, 10.0);
  const auto profile = minimal_velocity_profile(model, nullptr, moving, cfg);
  CHECK(profile.tol == 1e-2);
  REQUIRE(profile.values.size() == cfg.times.size());
  CHECK(profile.decaying);
  CHECK(profile.values.back() <= 1e-2);
  const size_t n = profile.values.size();
  CHECK(profile.values[n - 2] < profile.values[n - 3]);

  // a parked packet keeps mass at the origin forever
  const auto parked = drifting_state(g, 0.0, 4.0);
  const auto stuck = minimal_velocity_profile(model, nullptr, parked, cfg);
  CHECK(!stuck.decaying);
  CHECK(stuck.values.back() > 0.05);
}

TEST_CASE("free-flow interior decay distinguishes drifting from parked packets") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);

  const auto moving = drifting_state(g, 1.0, 7.9);
  const auto fit = free_min_velocity_decay(model, moving, 0.2);
  CHECK(!fit.all_below_floor);
  CHECK(fit.times.size() == 24);
  CHECK(fit.values.front() > fit.values.back());
  CHECK(fit.slope <= -(1.0 - 2.0 * model.lambda));

  // negative control: a zero-momentum packet never leaves the interior
  const auto parked = drifting_state(g, 0.0, 4.0);
  const auto flat = free_min_velocity_decay(model, parked, 2.0);
  CHECK(std::abs(flat.slope) <= 0.05);

  // consistency control: an interior threshold past the drift sees everything
  const auto swallowed = free_min_velocity_decay(model, moving, 3.0);
  CHECK(std::abs(swallowed.slope) <= 0.05);

  CHECK_THROWS_AS(free_min_velocity_decay(model, moving, 0.0),
                  ValidationError);
  CHECK_THROWS_AS(free_min_velocity_decay(model, moving, 0.2, 7),
                  ValidationError);
  CHECK_THROWS_AS(free_min_velocity_decay(model, moving, 0.2, 24, 4.0),
                  ValidationError);
}

TEST_CASE("window-band commutator probe decays at the contract rate") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);
  const auto psi = power_tail_state(g, 4.0, 41.0 * g.dp());
  const auto cfg = EstimateConfig::make(model);
  const auto h = CutoffSpec::ramp(1.0, 1.25);

  // expected slope is about -1.5 rho: t^-rho from the commutator scale times
  // t^(-rho/2) from the algebraic tail mass under the moving edge
  const auto slow_edge =
      commutator_decay_probe(model, nullptr, h, 0.5, psi,
                             doubling_times(4.0, 8), cfg);
  CHECK(!slow_edge.all_below_floor);
  CHECK(slow_edge.slope <= -0.5 + 0.1);

  const auto fast_edge =
      commutator_decay_probe(model, nullptr, h, 0.75, psi,
                             doubling_times(4.0, 6), cfg);
  CHECK(!fast_edge.all_below_floor);
  CHECK(fast_edge.slope <= -0.75 + 0.1);
}

TEST_CASE("potential-band commutator probe respects the predicted ceiling") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 128.0);
  const auto psi = power_tail_state(g, 4.0, 41.0 * g.dp());
  const auto cfg = EstimateConfig::make(model);
  const auto h = CutoffSpec::ramp(1.0, 1.25);

  const auto spec = PotentialSpec::static_bump(1.0, 4.0, model.lambda);
  const auto times = EstimateConfig::make(model, 64.0, 4).times;
  const auto fit =
      commutator_decay_probe(model, &spec, h, 0.5, psi, times, cfg);
  CHECK(!fit.all_below_floor);
  const double ceiling =
      predicted_commutator_exponent(4.0, model.lambda, 0.5);
  CHECK(fit.slope <= ceiling + 0.15);
}

TEST_CASE("commutator probe guards and degenerate inputs") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 512, 64.0);
  const auto psi = power_tail_state(g, 4.0, 10.0 * g.dp());
  const auto cfg = EstimateConfig::make(model, 64.0, 4);
  const auto h = CutoffSpec::ramp(1.0, 1.25);
  const auto times = doubling_times(4.0, 5);

  // amplitude-zero potential commutes with everything
  const auto silent = PotentialSpec::static_bump(0.0, 4.0, model.lambda);
  const auto fit =
      commutator_decay_probe(model, &silent, h, 0.5, psi, times, cfg);
  CHECK(fit.all_below_floor);
  CHECK(std::isinf(fit.slope));
  CHECK(fit.slope < 0.0);

  const auto other = PotentialSpec::static_bump(1.0, 4.0, 0.4);
  CHECK_THROWS_AS(
      commutator_decay_probe(model, &other, h, 0.5, psi, times, cfg),
      ValidationError);
  CHECK_THROWS_AS(commutator_decay_probe(model, nullptr, h, 0.5, psi,
                                         {1.0, 2.0, 3.0}, cfg),
                  ValidationError);
  CHECK_THROWS_AS(
      commutator_decay_probe(model, nullptr, h, 0.0, psi, times, cfg),
      ValidationError);
}

TEST_CASE("predicted commutator exponent arithmetic") {
  CHECK(predicted_commutator_exponent(4.0, 0.25, 0.5) ==
        doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(predicted_commutator_exponent(2.0, 0.25, 0.5) ==
        doctest::Approx(-0.875).epsilon(1e-12));
}
