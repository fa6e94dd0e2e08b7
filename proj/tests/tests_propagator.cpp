#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tdho/propagator.hpp"
#include "tdho/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace tdho;

namespace {

constexpr double pi = std::numbers::pi;

OscillatorModel model_free_inside() {
  return OscillatorModel::make(1.0, 3.0 / 16.0, 1.0, InnerProfile::constant(0.0));
}

OscillatorModel model_halfpi() {
  return OscillatorModel::make(1.0, 3.0 / 16.0, 1.0,
                               InnerProfile::constant(pi * pi / 4.0));
}

}  // namespace

TEST_CASE("rendered gaussian params match the direct sampler") {
  const auto g = Grid::make(1, 512, 32.0);
  const auto params = GaussianParams::pure(1, {1.0, 0.0}, {0.5, 0.0}, 2.0);
  const auto rendered = render_gaussian(g, params);
  const auto direct = make_gaussian(g, {1.0, 0.0}, {0.5, 0.0}, 2.0);
  CHECK(distance(rendered, direct) <= 1e-12);
  CHECK(params.var_x(0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(params.var_p(0) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("exact gaussian transport follows the classical flow") {
  const auto model = model_halfpi();
  const auto fs = solve_fundamental(model);
  const auto params = GaussianParams::pure(1, {1.5, 0.0}, {-0.75, 0.0}, 1.5);
  for (double t : {0.5, 1.0, 6.0, 64.0}) {
    const auto moved = evolve_gaussian_exact(fs, model.m, params, t);
    const auto flow = classical_flow(fs, {1.5, -0.75}, t);
    CHECK(moved.center[0] == doctest::Approx(flow.x).epsilon(1e-10));
    CHECK(moved.momentum[0] == doctest::Approx(flow.p).epsilon(1e-10));
  }
}

TEST_CASE("variance law for the exact gaussian evolution") {
  const auto model = model_free_inside();
  const auto fs = solve_fundamental(model);
  const auto params = GaussianParams::pure(1, {0.0, 0.0}, {1.0, 0.0}, 2.0);
  const double vx0 = params.var_x(0), vp0 = params.var_p(0);
  for (double t : {2.0, 8.0, 100.0}) {
    const auto moved = evolve_gaussian_exact(fs, model.m, params, t);
    const auto z1 = fs.cosine_like(t), z2 = fs.sine_like(t);
    const double expected =
        z1.value * z1.value * vx0 + z2.value * z2.value / (model.m * model.m) * vp0;
    CHECK(moved.var_x(0) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("split step agrees with the exact gaussian oracle") {
  const auto model = model_halfpi();
  const auto fs = solve_fundamental(model);
  const auto g = Grid::make(1, 1024, 48.0);
  const auto params = GaussianParams::pure(1, {0.5, 0.0}, {1.0, 0.0}, 2.0);
  const auto psi = render_gaussian(g, params);
  const StepPolicy policy{0.25, 1e-8, 12};
  const double t = 4.0;
  const auto stepped = evolve_full(model, nullptr, psi, 0.0, t, policy);
  const auto oracle = render_gaussian(g, evolve_gaussian_exact(fs, model.m, params, t));
  CHECK(distance(stepped, oracle) <= 1e-6);
  CHECK(norm(stepped) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ehrenfest means track the classical flow through the tail") {
  const auto model = model_free_inside();
  const auto fs = solve_fundamental(model);
  const auto g = Grid::make(1, 1024, 48.0);
  const auto psi = make_gaussian(g, {1.0, 0.0}, {0.8, 0.0}, 2.0);
  const StepPolicy policy{0.25, 1e-8, 12};
  const auto out = evolve_full(model, nullptr, psi, 0.0, 6.0, policy);
  const auto flow = classical_flow(fs, {1.0, 0.8}, 6.0);
  CHECK(mean_position(out)[0] == doctest::Approx(flow.x).epsilon(1e-6));
  CHECK(mean_momentum(out)[0] == doctest::Approx(flow.p).epsilon(1e-6));
}

TEST_CASE("propagator composition and reversal") {
  const auto model = model_halfpi();
  const auto g = Grid::make(1, 512, 24.0);
  const auto psi = make_gaussian(g, {0.0, 0.0}, {1.0, 0.0}, 1.5);
  const StepPolicy policy{0.25, 1e-7, 12};
  const auto leg1 = evolve_full(model, nullptr, psi, 0.0, 1.5, policy);
  const auto leg2 = evolve_full(model, nullptr, leg1, 1.5, 3.0, policy);
  const auto direct = evolve_full(model, nullptr, psi, 0.0, 3.0, policy);
  CHECK(distance(leg2, direct) <= 2.0 * 1e-7 * 3.0 + 1e-9);

  const auto back = evolve_full(model, nullptr, direct, 3.0, 0.0, policy);
  CHECK(distance(back, psi) <= 2.0 * 1e-7 * 3.0 + 1e-9);
}

TEST_CASE("split step converges at second order") {
  const auto model = model_halfpi();
  const auto fs = solve_fundamental(model);
  const auto g = Grid::make(1, 512, 24.0);
  const auto params = GaussianParams::pure(1, {1.0, 0.0}, {0.0, 0.0}, 1.5);
  const auto psi = render_gaussian(g, params);
  const auto oracle =
      render_gaussian(g, evolve_gaussian_exact(fs, model.m, params, 2.0));
  // huge budget disables Richardson halving so dt_max is the actual step
  double err[3];
  double dt = 0.1;
  for (int level = 0; level < 3; ++level, dt *= 0.5) {
    const StepPolicy coarse{dt, 1e6, 0};
    err[level] = distance(evolve_full(model, nullptr, psi, 0.0, 2.0, coarse), oracle);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("scaled frame free propagator is exactly unitary and composes") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 512, 32.0);
  const auto psi = make_gaussian(g, {0.0, 0.0}, {1.0, 0.0}, 2.0);
  const auto hop = evolve_free_S(model, psi, 1.0, 9.0);
  CHECK(norm(hop) == doctest::Approx(norm(psi)).epsilon(1e-13));
  const auto two = evolve_free_S(model, evolve_free_S(model, psi, 1.0, 3.0), 3.0, 9.0);
  CHECK(distance(two, hop) <= 1e-13);
  const auto back = evolve_free_S(model, hop, 9.0, 1.0);
  CHECK(distance(back, psi) <= 1e-13);
}

TEST_CASE("interacting scaled propagator reduces to the free one") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 512, 32.0);
  const auto psi = make_gaussian(g, {0.0, 0.0}, {1.0, 0.0}, 2.0);
  const StepPolicy policy{0.25, 1e-8, 12};
  const auto stepped = evolve_S(model, nullptr, psi, 1.0, 8.0, policy);
  const auto exact = evolve_free_S(model, psi, 1.0, 8.0);
  CHECK(distance(stepped, exact) <= 1e-7 * 7.0 + 1e-9);
}

TEST_CASE("dressing is unitary and invertible") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 1024, 48.0);
  const auto psi = make_gaussian(g, {1.0, 0.0}, {1.0, 0.0}, 3.0);
  for (double t : {1.0, 2.5, 6.0}) {
    const auto dressed = dressing_apply(model, psi, t, false);
    CHECK(norm(dressed) == doctest::Approx(1.0).epsilon(1e-9));
    const auto back = dressing_apply(model, dressed, t, true);
    CHECK(distance(back, psi) <= 1e-7);
  }
}

TEST_CASE("factorization residual vanishes at the anchor and stays in budget") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 2048, 64.0);
  const auto psi = make_gaussian(g, {0.0, 0.0}, {1.0, 0.0}, 2.0);
  const StepPolicy policy{0.25, 1e-7, 12};
  CHECK(factorization_residual(model, nullptr, psi, 1.0, policy) <= 1e-12);
  CHECK(factorization_residual(model, nullptr, psi, 2.0, policy) <= 1e-6);

  const auto spec = PotentialSpec::static_bump(1.0, 2.0, model.lambda);
  CHECK(factorization_residual(model, &spec, psi, 2.0, policy) <= 1e-5);
}

TEST_CASE("evolution rejects states that would leave the grid") {
  const auto model = model_free_inside();
  const auto g = Grid::make(1, 64, 8.0);
  const auto psi = make_gaussian(g, {0.0, 0.0}, {1.0, 0.0}, 1.0);
  const StepPolicy policy{0.25, 1e-7, 12};
  // classical spreading envelope at t = 400 is far beyond half_width = 8
  CHECK_THROWS_AS(evolve_full(model, nullptr, psi, 0.0, 400.0, policy),
                  DomainError);
}
