#include "tdho/grid.hpp"

#include <cmath>
#include <numbers>

#include "tdho/fft.hpp"

namespace tdho {

namespace {
constexpr double pi = std::numbers::pi;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_same_grid(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid == b.grid)) throw DomainError("wavefunctions live on different grids");
}
}  // namespace

Grid Grid::make(int dim, int n, double half_width) {
  if (dim != 1 && dim != 2) throw DomainError("grid dim must be 1 or 2");
  if (!power_of_two(n) || n < 16) throw DomainError("grid n must be a power of two >= 16");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw DomainError("grid half_width must be positive and finite");
  return Grid{dim, n, half_width};
}

double Grid::dp() const { return pi / half_width; }

double Grid::cell_volume() const {
  double v = dx();
  return dim == 1 ? v : v * v;
}

WaveFunction WaveFunction::zero(const Grid& g) {
  WaveFunction psi;
  psi.grid = g;
  psi.amp.assign(g.size(), cdouble{0.0, 0.0});
  return psi;
}

double norm2(const WaveFunction& psi) {
  double acc = 0.0;
  for (const cdouble& a : psi.amp) acc += std::norm(a);
  return acc * psi.grid.cell_volume();
}

double norm(const WaveFunction& psi) { return std::sqrt(norm2(psi)); }

cdouble inner(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a, b);
  cdouble acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.amp.size(); ++i) acc += std::conj(a.amp[i]) * b.amp[i];
  return acc * a.grid.cell_volume();
}

WaveFunction operator+(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a, b);
  WaveFunction out = a;
  for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] += b.amp[i];
  return out;
}

WaveFunction operator-(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a, b);
  WaveFunction out = a;
  for (std::size_t i = 0; i < out.amp.size(); ++i) out.amp[i] -= b.amp[i];
  return out;
}

WaveFunction operator*(cdouble scale, const WaveFunction& a) {
  WaveFunction out = a;
  for (cdouble& v : out.amp) v *= scale;
  return out;
}

double distance(const WaveFunction& a, const WaveFunction& b) {
  check_same_grid(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.amp.size(); ++i) acc += std::norm(a.amp[i] - b.amp[i]);
  return std::sqrt(acc * a.grid.cell_volume());
}

std::vector<cdouble> to_momentum(const WaveFunction& psi) {
  const Grid& g = psi.grid;
  const int n = g.n;
  std::vector<cdouble> work = psi.amp;

  // psihat(p) = (dx/sqrt(2pi))^d sum_j psi(x_j) exp(-i p x_j) on the sorted
  // lattice. The alternating sign shifts the DFT origin to the box center.
  auto parity = [](int j) { return (j & 1) ? -1.0 : 1.0; };
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) work[j] *= parity(j);
  } else {
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1)
        work[static_cast<std::size_t>(j0) * n + j1] *= parity(j0 + j1);
  }
  fft::transform_all(work.data(), g.dim, n, fft::forward);

  const double scale1 = g.dx() / std::sqrt(2.0 * pi);
  const double half_sign = ((n / 2) & 1) ? -1.0 : 1.0;
  if (g.dim == 1) {
    for (int k = 0; k < n; ++k) work[k] *= scale1 * half_sign * parity(k);
  } else {
    const double scale2 = scale1 * scale1;
    for (int k0 = 0; k0 < n; ++k0)
      for (int k1 = 0; k1 < n; ++k1)
        work[static_cast<std::size_t>(k0) * n + k1] *= scale2 * parity(k0 + k1);
  }
  return work;
}

WaveFunction from_momentum(const Grid& g, const std::vector<cdouble>& coeffs,
                           double time_tag) {
  if (coeffs.size() != g.size()) throw DomainError("momentum coefficient count mismatch");
  const int n = g.n;
  WaveFunction psi;
  psi.grid = g;
  psi.time_tag = time_tag;
  psi.amp = coeffs;

  auto parity = [](int j) { return (j & 1) ? -1.0 : 1.0; };
  const double half_sign = ((n / 2) & 1) ? -1.0 : 1.0;
  const double scale1 = g.dp() / std::sqrt(2.0 * pi);
  if (g.dim == 1) {
    for (int k = 0; k < n; ++k) psi.amp[k] *= scale1 * half_sign * parity(k);
  } else {
    const double scale2 = scale1 * scale1;
    for (int k0 = 0; k0 < n; ++k0)
      for (int k1 = 0; k1 < n; ++k1)
        psi.amp[static_cast<std::size_t>(k0) * n + k1] *= scale2 * parity(k0 + k1);
  }
  fft::transform_all(psi.amp.data(), g.dim, n, fft::backward);
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) psi.amp[j] *= parity(j);
  } else {
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1)
        psi.amp[static_cast<std::size_t>(j0) * n + j1] *= parity(j0 + j1);
  }
  return psi;
}

namespace {

std::vector<double> weighted_axis_sums(const Grid& g, const std::vector<cdouble>& amp,
                                       bool square, bool momentum_axis) {
  const int n = g.n;
  std::vector<double> acc(g.dim, 0.0);
  double total = 0.0;
  auto axis_value = [&](int idx) {
    return momentum_axis ? g.momentum_sorted(idx) : g.position(idx);
  };
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) {
      const double w = std::norm(amp[j]);
      const double v = axis_value(j);
      acc[0] += w * (square ? v * v : v);
      total += w;
    }
  } else {
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1) {
        const double w = std::norm(amp[static_cast<std::size_t>(j0) * n + j1]);
        const double v0 = axis_value(j0);
        const double v1 = axis_value(j1);
        acc[0] += w * (square ? v0 * v0 : v0);
        acc[1] += w * (square ? v1 * v1 : v1);
        total += w;
      }
  }
  if (total <= 0.0) throw DomainError("moment of a zero wavefunction");
  for (double& a : acc) a /= total;
  return acc;
}

}  // namespace

std::vector<double> mean_position(const WaveFunction& psi) {
  return weighted_axis_sums(psi.grid, psi.amp, false, false);
}

std::vector<double> variance_position(const WaveFunction& psi) {
  std::vector<double> m1 = mean_position(psi);
  std::vector<double> m2 = weighted_axis_sums(psi.grid, psi.amp, true, false);
  for (std::size_t i = 0; i < m1.size(); ++i) m2[i] -= m1[i] * m1[i];
  return m2;
}

std::vector<double> mean_momentum(const WaveFunction& psi) {
  return weighted_axis_sums(psi.grid, to_momentum(psi), false, true);
}

std::vector<double> variance_momentum(const WaveFunction& psi) {
  std::vector<cdouble> hat = to_momentum(psi);
  std::vector<double> m1 = weighted_axis_sums(psi.grid, hat, false, true);
  std::vector<double> m2 = weighted_axis_sums(psi.grid, hat, true, true);
  for (std::size_t i = 0; i < m1.size(); ++i) m2[i] -= m1[i] * m1[i];
  return m2;
}

double low_momentum_mass(const WaveFunction& psi, double p_cut) {
  const Grid& g = psi.grid;
  std::vector<cdouble> hat = to_momentum(psi);
  const int n = g.n;
  double inside = 0.0;
  double total = 0.0;
  if (g.dim == 1) {
    for (int k = 0; k < n; ++k) {
      const double w = std::norm(hat[k]);
      total += w;
      if (std::abs(g.momentum_sorted(k)) < p_cut) inside += w;
    }
  } else {
    for (int k0 = 0; k0 < n; ++k0)
      for (int k1 = 0; k1 < n; ++k1) {
        const double w = std::norm(hat[static_cast<std::size_t>(k0) * n + k1]);
        const double p0 = g.momentum_sorted(k0);
        const double p1 = g.momentum_sorted(k1);
        total += w;
        if (std::hypot(p0, p1) < p_cut) inside += w;
      }
  }
  return total > 0.0 ? inside / total : 0.0;
}

double mass_outside_box(const WaveFunction& psi, double x_max) {
  const Grid& g = psi.grid;
  const int n = g.n;
  double outside = 0.0;
  double total = 0.0;
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) {
      const double w = std::norm(psi.amp[j]);
      total += w;
      if (std::abs(g.position(j)) > x_max) outside += w;
    }
  } else {
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1) {
        const double w = std::norm(psi.amp[static_cast<std::size_t>(j0) * n + j1]);
        total += w;
        if (std::abs(g.position(j0)) > x_max || std::abs(g.position(j1)) > x_max)
          outside += w;
      }
  }
  return total > 0.0 ? outside / total : 0.0;
}

}  // namespace tdho
