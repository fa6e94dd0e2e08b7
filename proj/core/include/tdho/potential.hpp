#pragma once

#include "tdho/errors.hpp"
#include "tdho/grid.hpp"

#include <vector>

namespace tdho {

/// Short-range potential family g * b(t) * (1 + |x|^2)^{-rho/2}.  The decay
/// exponent must satisfy rho > 1/(1 - lambda) for the oscillator exponent the
/// spec is paired with; that exponent is stored for scaled-frame evaluation.
/// The optional time factor is b(t) = cos(omega t) with |omega| <= 1, keeping
/// |b| and |b'| bounded by 1.
struct PotentialSpec {
  double g = 0.0;
  double rho = 2.0;
  double omega = 0.0;
  bool oscillating = false;
  double c_s0 = 0.0;  ///< claimed sup bound:      |V| <= c_s0 (1+|x|^2)^{-rho/2}
  double c_s1 = 0.0;  ///< claimed gradient bound: |V'| <= c_s1 (1+|x|^2)^{-(rho+1)/2}
  double lambda_ref = 0.0;

  static PotentialSpec static_bump(double g, double rho, double lambda);
  static PotentialSpec oscillating_bump(double g, double rho, double omega,
                                        double lambda);

  double time_factor(double t) const;
  /// g * b(t), the spatial profile's prefactor at time t.
  double amplitude(double t) const { return g * time_factor(t); }
  /// (1 + r2)^{-rho/2}, with fast paths for even integer rho.
  double decay_factor(double r2) const;
  /// V(t, x) as a function of r2 = |x|^2.
  double radial(double t, double r2) const {
    return amplitude(t) * decay_factor(r2);
  }
};

/// Samples V(t, x) on the grid; scaled=true evaluates V(t, t^lambda x) using
/// the exponent stored in the spec.
std::vector<double> potential_eval(const PotentialSpec& spec, double t,
                                   const Grid& grid, bool scaled);

}  // namespace tdho
