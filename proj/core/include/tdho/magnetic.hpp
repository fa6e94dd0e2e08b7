#pragma once

#include "tdho/oscillator.hpp"
#include "tdho/potential.hpp"
#include "tdho/propagator.hpp"

namespace tdho {

/// Planar charge in a time-decaying magnetic field with the piecewise profile
/// B(t) = b0 for |t| <= r0 and bbar/t beyond.  The companion oscillator with
/// k(t) = q^2 B(t)^2 / (4m) is derived at construction; its tail constant
/// q^2 bbar^2 / (4m) must land in (0, m/4), which also bounds bbar.
struct MagneticModel {
  double q = 1.0;
  double b0 = 0.0;
  double bbar = 0.0;
  double r0 = 1.0;
  double m = 1.0;
  OscillatorModel oscillator;

  static MagneticModel make(double q, double b0, double bbar, double r0, double m);

  double field(double t) const;
  /// Angular speed of the inner-region circular orbit, q b0 / m.
  double cyclotron_frequency() const { return q * b0 / m; }
};

/// Accumulated rotation phase: the integral of q B(tau) / m over [0, t],
/// evaluated in closed form (linear inside |t| <= r0, logarithmic outside).
double omega_phase(const MagneticModel& mm, double t);

/// Angular-momentum expectation <x0 p1 - x1 p0> (not normalized by ||psi||^2).
double angular_momentum(const WaveFunction& psi);

/// Rotation unitary e^{i angle L} with L = x0 p1 - x1 p0: the amplitude is
/// resampled at coordinates rotated counterclockwise by the angle, so
/// position expectations rotate clockwise for positive angles.  Realized by
/// the three-shear factorization
///   R(angle) = shear_x(-tan(angle/2)) shear_y(sin angle) shear_x(-tan(angle/2))
/// with each shear a per-line spectral translation (exactly unitary).  Angles
/// beyond pi/4 are split into equal sub-rotations.  Each sub-rotation checks
/// that at most 1e-12 of the mass sits outside the sheared safe zone, in both
/// position and momentum (DomainError otherwise).
WaveFunction rotate_state(const WaveFunction& psi, double angle);

/// U_B(t1, t0) for H(t) = p^2/(2m) + q^2 B(t)^2 x^2 / (8m) - (q B(t)/2m) L
/// + V(t, x) on a 2D grid: Strang splitting with midpoint coefficients, the
/// angular term applied as an exact spectral rotation by (q B(t_mid)/2m) dt
/// each step.  Time ranges crossing +-r0 are split there so no step straddles
/// the field's corner.  V may be null.
WaveFunction evolve_magnetic(const MagneticModel& mm, const PotentialSpec* V,
                             const WaveFunction& psi, double t0, double t1,
                             const StepPolicy& policy);

/// Companion oscillator evolution p^2/(2m) + k(t) x^2/2 + V(t, x) with the
/// derived k; delegates to the shared split-step engine.  In the corotating
/// picture the potential's argument is rotated, but the supported potential
/// family is radial, so the rotation acts as the identity on V.
WaveFunction evolve_OS(const MagneticModel& mm, const PotentialSpec* V,
                       const WaveFunction& psi, double t0, double t1,
                       const StepPolicy& policy);

/// || evolve_magnetic(psi, 0 -> t) - e^{i omega_phase(t) L / 2} evolve_OS(psi,
/// 0 -> t) ||: the rotation-reduction defect, bounded by the combined engine
/// budgets when the factorization holds.
double reduction_residual(const MagneticModel& mm, const PotentialSpec* V,
                          const WaveFunction& psi, double t,
                          const StepPolicy& policy);

}  // namespace tdho
