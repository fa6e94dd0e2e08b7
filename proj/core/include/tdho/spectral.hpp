#pragma once

#include "tdho/grid.hpp"
#include "tdho/oscillator.hpp"

#include <array>
#include <functional>

namespace tdho {

/// Callback receiving a lattice point; in 1D the second component is 0.
using PointFn = std::function<cdouble(const std::array<double, 2>&)>;

/// Pointwise product psi(x) * g(x) on the position lattice.
WaveFunction apply_position_multiplier(const WaveFunction& psi, const PointFn& g);

/// Multiplier f(p) on the sorted momentum lattice: ifft(f * fft(psi)).
WaveFunction apply_fourier_multiplier(const WaveFunction& psi, const PointFn& f);

/// Multiplies by the unimodular phase exp(i * coeff * |x|^2).
WaveFunction quadratic_position_phase(const WaveFunction& psi, double coeff);

/// Multiplies by exp(i * coeff * |p|^2) on the momentum side (free steps).
WaveFunction quadratic_momentum_phase(const WaveFunction& psi, double coeff);

/// Normalized Gaussian exp(-|x-x0|^2/(2 width^2) + i p0.x).  The center must
/// sit at least 6 widths from every boundary and the momentum must sit inside
/// the lattice band with the same margin in 1/width.
WaveFunction make_gaussian(const Grid& grid, const std::array<double, 2>& center,
                           const std::array<double, 2>& momentum, double width);

/// Scaling unitary (e^{-i beta A} psi)(x) = e^{n beta} psi(e^{2 beta} x) with
/// A = x.p + p.x: positive beta squeezes position support (x^2 expectations
/// scale by e^{-4 beta}) and stretches the momentum band (p^2 by e^{4 beta}).
/// Realized by zero-padded (2x) trigonometric resampling.  Guards: the scale
/// factor e^{2 beta} must stay in [1/64, 64]; for beta < 0 the position mass
/// must fit the rescaled window, for beta > 0 the momentum band must fit
/// inside Nyquist after expansion.  DomainError otherwise.
WaveFunction dilate(const WaveFunction& psi, double beta);

/// Radial defect operator: (x/max(|x|, guard)) . (p - m(1-2l) x / t^{1-2l})
/// with symmetric ordering (u.v + v.u)/2 per axis.  origin_guard <= 0 selects
/// the default of one grid spacing.
WaveFunction theta_apply(const WaveFunction& psi, const OscillatorModel& model,
                         double t, double origin_guard = 0.0);

}  // namespace tdho
