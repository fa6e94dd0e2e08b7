#include "tdho/potential.hpp"

#include <cmath>

namespace tdho {

namespace {

void validate(double g, double rho, double lambda) {
  if (!std::isfinite(g)) throw ValidationError("potential coupling must be finite");
  if (!(lambda > 0.0 && lambda < 0.5))
    throw ValidationError("potential needs an oscillator exponent in (0, 1/2)");
  if (!(rho > 1.0 / (1.0 - lambda)))
    throw ValidationError("potential decay exponent must exceed 1/(1 - lambda)");
}

}  // namespace

PotentialSpec PotentialSpec::static_bump(double g, double rho, double lambda) {
  validate(g, rho, lambda);
  PotentialSpec spec;
  spec.g = g;
  spec.rho = rho;
  spec.lambda_ref = lambda;
  spec.c_s0 = std::abs(g);
  spec.c_s1 = std::abs(g) * rho;
  return spec;
}

PotentialSpec PotentialSpec::oscillating_bump(double g, double rho, double omega,
                                              double lambda) {
  if (!(std::abs(omega) <= 1.0))
    throw ValidationError("time-factor rate must satisfy |omega| <= 1");
  PotentialSpec spec = static_bump(g, rho, lambda);
  spec.omega = omega;
  spec.oscillating = true;
  return spec;
}

double PotentialSpec::time_factor(double t) const {
  return oscillating ? std::cos(omega * t) : 1.0;
}

double PotentialSpec::decay_factor(double r2) const {
  const double u = 1.0 + r2;
  if (rho == 2.0) return 1.0 / u;
  if (rho == 4.0) return 1.0 / (u * u);
  if (rho == 6.0) return 1.0 / (u * u * u);
  return std::pow(u, -0.5 * rho);
}

std::vector<double> potential_eval(const PotentialSpec& spec, double t,
                                   const Grid& grid, bool scaled) {
  const double stretch = scaled ? std::pow(t, 2.0 * spec.lambda_ref) : 1.0;
  if (scaled && !(t > 0.0)) throw DomainError("scaled potential needs t > 0");
  std::vector<double> out(grid.size());
  if (grid.dim == 1) {
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.position(i);
      out[i] = spec.radial(t, stretch * x * x);
    }
    return out;
  }
  for (int r = 0; r < grid.n; ++r) {
    const double y = grid.position(r);
    for (int c = 0; c < grid.n; ++c) {
      const double x = grid.position(c);
      out[static_cast<std::size_t>(r) * grid.n + c] =
          spec.radial(t, stretch * (x * x + y * y));
    }
  }
  return out;
}

}  // namespace tdho
