#pragma once

#include "tdho/grid.hpp"
#include "tdho/oscillator.hpp"
#include "tdho/potential.hpp"

#include <array>

namespace tdho {

/// Split-step control: evolutions run at a nominal step, then verify by
/// halving (Richardson comparison on the full interval) until the two finest
/// runs differ by at most error_target * |t1 - t0| in L2.  max_halvings = 0
/// runs the nominal step once with no verification (fixed-step mode).
struct StepPolicy {
  double dt_max = 0.25;
  double error_target = 1e-7;
  int max_halvings = 12;
};

/// Gaussian parameter set: the state exp(i sum_j [A_j q_j^2 + p_j q_j] + i s)
/// with q = x - center, A_j = -1/(2 W_j), W_j the complex width (initially
/// i sigma^2), and s the complex log-amplitude (Im s fixes normalization).
struct GaussianParams {
  int dim = 1;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> momentum{0.0, 0.0};
  std::array<cdouble, 2> complex_width{cdouble(0.0, 1.0), cdouble(0.0, 1.0)};
  cdouble phase{0.0, 0.0};

  /// Uncorrelated normalized Gaussian matching make_gaussian's convention
  /// (plane-wave factor e^{i p0.x}).
  static GaussianParams pure(int dim, const std::array<double, 2>& center,
                             const std::array<double, 2>& momentum, double width);

  double var_x(int axis) const;
  double var_p(int axis) const;
};

/// Samples the parametrized Gaussian on a grid (no renormalization).
WaveFunction render_gaussian(const Grid& grid, const GaussianParams& params);

/// U(t1, t0) for H(t) = p^2/(2m) + k(t) x^2/2 + V(t, x), Strang splitting with
/// midpoint coefficients.  Checks a classical spreading envelope against the
/// grid before running.  V may be null.
WaveFunction evolve_full(const OscillatorModel& model, const PotentialSpec* V,
                         const WaveFunction& psi, double t0, double t1,
                         const StepPolicy& policy);

/// Scaled-frame propagator for p^2/(2m t^{2 lambda}) + V(t, t^lambda x),
/// defined for t0, t1 >= r0.  Steps are capped at (distance to r0)/8 near r0.
WaveFunction evolve_S(const OscillatorModel& model, const PotentialSpec* V,
                      const WaveFunction& psi, double t0, double t1,
                      const StepPolicy& policy);

/// Exact scaled-frame free propagator: the single Fourier multiplier
/// exp(-i (t1^{1-2l} - t0^{1-2l}) p^2 / (2m(1-2l))).
WaveFunction evolve_free_S(const OscillatorModel& model, const WaveFunction& psi,
                           double t0, double t1);

/// Exact parameter transport from time 0 to t under H_0(t) (V = 0): center
/// follows the classical flow, widths follow the Moebius action of the
/// fundamental matrix, and the phase accumulates the classical action plus
/// the width half-log with continuous branch tracking.
GaussianParams evolve_gaussian_exact(const FundamentalSolution& fs, double m,
                                     const GaussianParams& params, double t);

/// The dressing M(t) = phase(exp(i m lambda x^2 / (2t))) after the scaling
/// unitary that stretches position support by t^lambda (dilate with
/// beta = -lambda log(t) / 2), or its inverse.
WaveFunction dressing_apply(const OscillatorModel& model, const WaveFunction& psi,
                            double t, bool inverse);

/// || U(t,r0) psi - M(t) U_S(t,r0) M(r0)^{-1} psi ||, both sides run at the
/// same policy.
double factorization_residual(const OscillatorModel& model, const PotentialSpec* V,
                              const WaveFunction& psi, double t,
                              const StepPolicy& policy);

}  // namespace tdho
