#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

using cdouble = std::complex<double>;

/// Uniform periodic grid on [-half_width, half_width)^dim with n points per
/// axis. The dual momentum lattice has spacing pi/half_width and spans
/// [-pi*n/(2*half_width), pi*n/(2*half_width)).
struct Grid {
  int dim = 1;
  int n = 0;
  double half_width = 0.0;

  static Grid make(int dim, int n, double half_width);

  double dx() const { return 2.0 * half_width / n; }
  double dp() const;
  double nyquist() const { return 0.5 * n * dp(); }
  double position(int i) const { return -half_width + i * dx(); }
  /// Momentum of FFT bin `k` in wrap-around order.
  double momentum_wrapped(int k) const {
    return (k < n / 2 ? k : k - n) * dp();
  }
  /// Momentum of index `i` on the sorted (ascending) lattice.
  double momentum_sorted(int i) const { return (i - n / 2) * dp(); }
  std::size_t size() const {
    return dim == 1 ? static_cast<std::size_t>(n)
                    : static_cast<std::size_t>(n) * n;
  }
  double cell_volume() const;

  bool operator==(const Grid& other) const = default;
};

/// Complex amplitudes sampled on a Grid, row-major for dim 2.
/// The L2 norm is the lattice sum weighted by the cell volume.
struct WaveFunction {
  Grid grid;
  std::vector<cdouble> amp;
  double time_tag = 0.0;

  static WaveFunction zero(const Grid& g);
};

double norm2(const WaveFunction& psi);
double norm(const WaveFunction& psi);
cdouble inner(const WaveFunction& a, const WaveFunction& b);

WaveFunction operator+(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator-(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator*(cdouble scale, const WaveFunction& a);
double distance(const WaveFunction& a, const WaveFunction& b);

/// Momentum representation on the sorted lattice, normalized so that the
/// weighted lattice sums of |amp|^2 agree on both sides (Parseval).
std::vector<cdouble> to_momentum(const WaveFunction& psi);
WaveFunction from_momentum(const Grid& g, const std::vector<cdouble>& coeffs,
                           double time_tag = 0.0);

std::vector<double> mean_position(const WaveFunction& psi);
std::vector<double> mean_momentum(const WaveFunction& psi);
std::vector<double> variance_position(const WaveFunction& psi);
std::vector<double> variance_momentum(const WaveFunction& psi);

/// Fraction of norm2 carried by momenta with |p| < p_cut.
double low_momentum_mass(const WaveFunction& psi, double p_cut);
/// Fraction of norm2 outside the centered box |x_j| <= x_max (per axis).
double mass_outside_box(const WaveFunction& psi, double x_max);

}  // namespace tdho
