#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tdho/magnetic.hpp"
#include "tdho/errors.hpp"
#include "tdho/scattering.hpp"
#include "tdho/spectral.hpp"

#include <array>
#include <cmath>
#include <complex>

using namespace tdho;

namespace {

constexpr double pi = 3.14159265358979323846;

MagneticModel mm_slow() { return MagneticModel::make(1.0, 0.5, 0.5, 1.0, 1.0); }

MagneticModel mm_cyclotron() {
  return MagneticModel::make(1.0, 2.0 * pi, 0.5, 1.0, 1.0);
}

WaveFunction offset_state(const Grid& g) {
  return make_gaussian(g, {1.0, 0.0}, {0.0, 1.0}, 1.0);
}

/// Algebraic tails along both axes; trips mass-based support guards that a
/// grid-legal Gaussian can never reach.
WaveFunction power_tail_2d(const Grid& g, double width) {
  WaveFunction psi = WaveFunction::zero(g);
  std::size_t idx = 0;
  for (int i = 0; i < g.n; ++i) {
    const double x = g.position(i);
    for (int j = 0; j < g.n; ++j, ++idx) {
      const double y = g.position(j);
      psi.amp[idx] = 1.0 / std::sqrt((1.0 + x * x / (width * width)) *
                                     (1.0 + y * y / (width * width)));
    }
  }
  const double scale = 1.0 / norm(psi);
  for (auto& a : psi.amp) a *= scale;
  return psi;
}

WaveFunction apply_L(const WaveFunction& psi) {
  const auto p0 = apply_fourier_multiplier(
      psi, [](const std::array<double, 2>& p) { return cdouble(p[0], 0.0); });
  const auto p1 = apply_fourier_multiplier(
      psi, [](const std::array<double, 2>& p) { return cdouble(p[1], 0.0); });
  const auto x0p1 = apply_position_multiplier(
      p1, [](const std::array<double, 2>& x) { return cdouble(x[0], 0.0); });
  const auto x1p0 = apply_position_multiplier(
      p0, [](const std::array<double, 2>& x) { return cdouble(x[1], 0.0); });
  return x0p1 - x1p0;
}

}  // namespace

TEST_CASE("magnetic model derivations and guards") {
  const auto mm = mm_slow();
  // companion coefficient q^2 B^2 / (4m): tail 0.0625 puts lambda near 0.067
  CHECK(mm.oscillator.k == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(mm.oscillator.inner.k0 == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(mm.oscillator.lambda ==
        doctest::Approx(0.5 * (1.0 - std::sqrt(0.75))).epsilon(1e-12));
  CHECK(mm.oscillator.r0 == 1.0);
  CHECK(mm.oscillator.m == 1.0);

  const auto mc = mm_cyclotron();
  CHECK(mc.oscillator.inner.k0 == doctest::Approx(pi * pi).epsilon(1e-12));
  CHECK(mc.cyclotron_frequency() == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(mc.field(0.3) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(mc.field(1.0) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(mc.field(2.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mc.field(-4.0) == doctest::Approx(-0.125).epsilon(1e-14));

  CHECK_THROWS_AS(MagneticModel::make(0.0, 1.0, 0.5, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(MagneticModel::make(1.0, 1.0, 0.5, -1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(MagneticModel::make(1.0, 1.0, 0.5, 1.0, 0.0), ValidationError);
  // tail coefficient must land in (0, m/4): bbar = 0 and bbar = m/q both fail
  CHECK_THROWS_AS(MagneticModel::make(1.0, 1.0, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(MagneticModel::make(1.0, 1.0, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("rotation phase accumulates the field integral") {
  const auto mm = MagneticModel::make(1.0, 2.0, 0.5, 1.0, 1.0);
  CHECK(omega_phase(mm, 0.0) == 0.0);
  CHECK(omega_phase(mm, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(omega_phase(mm, 1.0) == doctest::Approx(2.0).epsilon(1e-13));
  const double e = std::exp(1.0);
  CHECK(omega_phase(mm, e) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(omega_phase(mm, 4.0) ==
        doctest::Approx(2.0 + 0.5 * std::log(4.0)).epsilon(1e-12));
  // odd in t: the inner part flips sign, the log part integrates to +qbbar/m
  CHECK(omega_phase(mm, -0.5) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(omega_phase(mm, -e) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("angular momentum expectation") {
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = make_gaussian(g, {2.0, 0.0}, {0.0, 0.75}, 0.7);
  CHECK(angular_momentum(psi) == doctest::Approx(1.5).epsilon(1e-8));

  const auto radial = make_gaussian(g, {0.0, 0.0}, {0.0, 0.0}, 1.0);
  CHECK(std::abs(angular_momentum(radial)) <= 1e-10);

  // L commutes with the rotation it generates
  CHECK(std::abs(angular_momentum(rotate_state(psi, 0.5)) -
                 angular_momentum(psi)) <= 1e-6);
}

TEST_CASE("rotation unitary: exactness, orientation, generator") {
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = make_gaussian(g, {2.0, 0.0}, {0.0, 0.75}, 0.7);

  CHECK(distance(rotate_state(psi, 0.0), psi) <= 1e-12);
  CHECK(std::abs(norm(rotate_state(psi, 0.7)) - 1.0) <= 1e-10);

  const auto radial = make_gaussian(g, {0.0, 0.0}, {0.0, 0.0}, 1.0);
  CHECK(distance(rotate_state(radial, 0.9), radial) <= 1e-10);

  // positive angles move position expectations clockwise
  const auto turned = rotate_state(psi, 0.3);
  const auto mean = mean_position(turned);
  CHECK(mean[0] == doctest::Approx(2.0 * std::cos(0.3)).epsilon(1e-6));
  CHECK(mean[1] == doctest::Approx(-2.0 * std::sin(0.3)).epsilon(1e-6));

  const auto quarter = rotate_state(psi, 0.5 * pi);  // split into two sh~pi/4
  const auto qm = mean_position(quarter);
  CHECK(std::abs(qm[0]) <= 1e-6);
  CHECK(qm[1] == doctest::Approx(-2.0).epsilon(1e-6));

  CHECK(distance(rotate_state(rotate_state(psi, 0.4), -0.4), psi) <= 1e-10);

  // e^{i angle L}: the linearization defect shrinks quadratically
  const auto L_psi = apply_L(psi);
  auto defect = [&](double delta) {
    return distance(rotate_state(psi, delta), psi + cdouble(0.0, delta) * L_psi);
  };
  const double d1 = defect(1e-3);
  const double d2 = defect(2e-3);
  CHECK(d1 <= 1e-3);
  CHECK(d2 / d1 == doctest::Approx(4.0).epsilon(0.15));

  // algebraic tails reach the sheared safe zone at far more than 1e-12 mass
  const auto heavy = power_tail_2d(g, 2.0);
  CHECK_THROWS_AS(rotate_state(heavy, 0.5), DomainError);
}

TEST_CASE("magnetic evolution matches the free flow when the field is off inside") {
  const auto mm = MagneticModel::make(1.0, 0.0, 0.5, 1.0, 1.0);
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = offset_state(g);

  const double t = 0.8;
  const auto evolved =
      evolve_magnetic(mm, nullptr, psi, 0.0, t, {0.25, 1e-8, 12});
  const auto exact = quadratic_momentum_phase(psi, -0.5 * t / mm.m);
  CHECK(distance(evolved, exact) <= 1e-8);
  CHECK(std::abs(norm(evolved) - 1.0) <= 1e-10);
}

TEST_CASE("magnetic evolution composes across the field corner") {
  const auto mm = mm_slow();
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = offset_state(g);
  const StepPolicy policy{0.25, 1e-6, 12};

  const auto whole = evolve_magnetic(mm, nullptr, psi, 0.0, 2.0, policy);
  const auto inner = evolve_magnetic(mm, nullptr, psi, 0.0, 1.0, policy);
  const auto two = evolve_magnetic(mm, nullptr, inner, 1.0, 2.0, policy);
  CHECK(distance(whole, two) <= 1e-5);
  CHECK(std::abs(norm(whole) - 1.0) <= 1e-9);
}

TEST_CASE("constant-field cyclotron period") {
  const auto mm = mm_cyclotron();
  const auto g = Grid::make(2, 128, 6.0);
  // orbit of radius 2 about the origin: canonical momentum -q b0 a / 2 y-hat
  const auto psi = make_gaussian(g, {2.0, 0.0}, {0.0, -2.0 * pi}, 0.5);

  const double period = 2.0 * pi / mm.cyclotron_frequency();
  REQUIRE(period == doctest::Approx(1.0).epsilon(1e-14));
  const auto evolved =
      evolve_magnetic(mm, nullptr, psi, 0.0, period, {0.25, 1e-4, 14});

  const auto mean = mean_position(evolved);
  const double angle = std::atan2(mean[1], mean[0]);
  CHECK(std::abs(angle) <= 2.0 * pi * 1e-3);
  CHECK(std::hypot(mean[0], mean[1]) == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(std::abs(angular_momentum(evolved) - angular_momentum(psi)) <= 0.02);
}

TEST_CASE("angular momentum is conserved by radial potentials") {
  const auto mm = mm_slow();
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = offset_state(g);
  const auto bump = PotentialSpec::static_bump(0.5, 4.0, mm.oscillator.lambda);

  const auto evolved =
      evolve_magnetic(mm, &bump, psi, 0.0, 1.5, {0.25, 1e-6, 12});
  CHECK(std::abs(angular_momentum(evolved) - angular_momentum(psi)) <= 1e-4);
  CHECK(std::abs(norm(evolved) - 1.0) <= 1e-9);
}

TEST_CASE("oscillator delegate matches the shared engine") {
  const auto mm = mm_slow();
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = offset_state(g);
  const StepPolicy policy{0.25, 1e-6, 12};

  const auto via_mm = evolve_OS(mm, nullptr, psi, 0.0, 1.0, policy);
  const auto direct = evolve_full(mm.oscillator, nullptr, psi, 0.0, 1.0, policy);
  CHECK(distance(via_mm, direct) <= 1e-10);
}

TEST_CASE("rotation reduction to the companion oscillator") {
  const auto mm = mm_slow();
  const auto g = Grid::make(2, 256, 12.0);
  const auto psi = offset_state(g);
  const StepPolicy policy{0.25, 2e-7, 16};

  CHECK(reduction_residual(mm, nullptr, psi, 0.0, policy) <= 1e-14);
  CHECK(reduction_residual(mm, nullptr, psi, mm.r0, policy) <= 1e-6);

  const auto bump = PotentialSpec::static_bump(1.0, 4.0, mm.oscillator.lambda);
  CHECK(reduction_residual(mm, &bump, psi, 2.0 * mm.r0, policy) <= 1e-6);

  CHECK_THROWS_AS(reduction_residual(mm, nullptr, psi, -1.0, policy),
                  DomainError);
}

TEST_CASE("reduction residual is gauge-phase invariant") {
  const auto mm = mm_slow();
  const auto g = Grid::make(2, 128, 8.0);
  const auto psi = offset_state(g);
  const StepPolicy policy{0.25, 1e-5, 10};

  const double base = reduction_residual(mm, nullptr, psi, 0.5, policy);
  const double spun =
      reduction_residual(mm, nullptr, std::polar(1.0, 0.7) * psi, 0.5, policy);
  CHECK(std::abs(base - spun) <= 1e-12);
}

TEST_CASE("companion oscillator drives the shared scattering machinery") {
  const auto mm = mm_slow();
  const auto& model = mm.oscillator;
  const auto g = Grid::make(2, 512, 64.0);
  const auto psi = make_gaussian(g, {0.0, 0.0}, {1.0, 0.0}, 6.0);
  const auto bump = PotentialSpec::static_bump(0.5, 4.0, model.lambda);

  const auto report =
      wave_operator_forward(model, bump, psi, 1e-2, {0.25, 1e-5, 10}, 0.025, 3);
  REQUIRE(report.horizons.size() >= 2);  // r0 itself plus at least one doubling
  CHECK(report.horizons.size() <= 4);
  for (size_t i = 0; i < report.horizons.size(); ++i)
    CHECK(report.horizons[i] ==
          doctest::Approx(model.r0 * std::pow(2.0, double(i))));
  CHECK(report.cauchy_gaps.size() + 1 == report.horizons.size());
  for (double gap : report.cauchy_gaps) {
    CHECK(gap >= 0.0);
    CHECK(std::isfinite(gap));
  }
  CHECK(std::abs(norm(report.result) - 1.0) <= 1e-6);
}
