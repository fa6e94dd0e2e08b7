#pragma once

#include "tdho/cutoffs.hpp"
#include "tdho/propagator.hpp"
#include "tdho/scattering.hpp"

#include <vector>

namespace tdho {

/// Parameter block for the phase-space localization diagnostics.  theta and
/// eps4 are always derived; eps5 defaults to the midpoint of its admissible
/// window (3 eps + eps2, kappa1 / (m (1 - 2 lambda) sqrt(R1))) when left at 0.
///
/// The stock eps/eps2 values are chosen so that the eps5 window is nonempty
/// for every admissible model: the window's upper end scales like
/// kappa1 / sqrt(R1), so wide momentum bands force small transition widths.
struct EstimateConfig {
  double kappa1 = 0.05;  ///< phi1 band lower threshold (in p^2)
  double R1 = 16.0;      ///< phi1 band upper threshold (in p^2)
  double kappa2 = 0.05;  ///< spatial ramp scale shared with range membership
  double eps = 0.002;    ///< transition width of every window cutoff
  double eta0 = 1.0;     ///< outer-shell width of the fast-region window
  double eps2 = 0.01;    ///< inner edge of the intermediate-region window
  double eps3 = 0.03;    ///< outer-edge offset of the intermediate window
  double eps4 = 0.0;     ///< derived: eps3 + eps
  double eps5 = 0.0;     ///< slow-region threshold; derived midpoint if 0
  double theta = 0.0;    ///< derived: 2 sqrt(R1) / (m (1 - 2 lambda))
  std::vector<double> times;  ///< geometric sample grid on [r0, T_max]

  /// Stock configuration: default cutoffs, geometric time grid with
  /// per_octave samples per doubling up to t_max (default 2^10 r0).
  static EstimateConfig make(const OscillatorModel& model, double t_max = 0.0,
                             int per_octave = 4);

  /// Fills the derived fields from the model, then validates.
  void finalize(const OscillatorModel& model);

  /// Checks the ordering constraints: eps2 > eps, eps3 > 2 eps, eta0 > 2 eps,
  /// eps4 = eps3 + eps, and 3 eps + eps2 < eps5 < kappa1/(m(1-2l) sqrt(R1)),
  /// plus an increasing time grid starting at r0.  ValidationError otherwise.
  void validate(const OscillatorModel& model) const;

  RangeCutoffs range_cutoffs() const;
  /// Band cutoff phi1(p^2) shared by all the estimates.
  CutoffSpec phi1() const { return range_cutoffs().phi1(); }
};

/// One time-integrated localization functional: integrand samples f(t) and
/// the running integral of f against dt/t (trapezoid in u = log t, exact for
/// integrands polynomial in u).  bound_estimate is the final partial integral;
/// the partials are nondecreasing since every integrand is a squared norm.
struct IntegralSeries {
  std::vector<double> times;
  std::vector<double> integrand;
  std::vector<double> partial;
  double bound_estimate = 0.0;
};

/// Log-log decay record: sampled norms and the fitted slope of log(value)
/// against log(t).  If every value sits below the fit floor the series is
/// numerically zero; slope is then -infinity and all_below_floor is set.
struct DecayFit {
  std::vector<double> times;
  std::vector<double> values;
  double slope = 0.0;
  bool all_below_floor = false;
};

/// Defect sequence for the slow-region diagnostic with its verdict:
/// decaying means the last three samples strictly decrease and the final
/// value is at most tol.
struct DecayProfile {
  std::vector<double> times;
  std::vector<double> values;
  bool decaying = false;
  double tol = 0.0;
};

/// Least-squares slope of log(values) vs log(times) over samples with
/// value > floor_value.  FitError if fewer than four samples survive.
double fit_loglog_slope(const std::vector<double>& times,
                        const std::vector<double>& values,
                        double floor_value = 1e-13);

/// Fast-region functional: samples
///   || F_eps(theta <= |x|/t^{1-2l} <= theta + eta0) phi1(p^2) U_S(t,r0) psi ||^2
/// over cfg.times and integrates against dt/t.  spec may be null (free flow,
/// evolved by the exact multiplier).
IntegralSeries large_velocity_integral(const OscillatorModel& model,
                                       const PotentialSpec* spec,
                                       const WaveFunction& psi,
                                       const EstimateConfig& cfg,
                                       const StepPolicy& policy = {});

/// Intermediate-region functional: samples
///   sum_j || (p_j - m(1-2l) t^{-(1-2l)} x_j) F_eps(eps2 <= |x|/t^{1-2l} <=
///   theta + eps3) phi1(p^2) U_S(t,r0) psi ||^2
/// componentwise (each factor p_j - c x_j is self-adjoint as written) and
/// integrates against dt/t.
IntegralSeries middle_velocity_integral(const OscillatorModel& model,
                                        const PotentialSpec* spec,
                                        const WaveFunction& psi,
                                        const EstimateConfig& cfg,
                                        const StepPolicy& policy = {});

/// Slow-region defect || F_eps(|x|/t^{1-2l} <= eps5) U_S(t,r0) psi || over
/// cfg.times.  Diagnostic only: never throws on non-decay.  Range membership
/// of psi is estimated along the same sweep and a warning is logged when the
/// final membership defects exceed 5% of ||psi||.
DecayProfile minimal_velocity_profile(const OscillatorModel& model,
                                      const PotentialSpec* spec,
                                      const WaveFunction& psi,
                                      const EstimateConfig& cfg,
                                      double tol = 1e-2,
                                      const StepPolicy& policy = {});

/// Free-flow interior decay: samples
///   || F_eps(|x|/t^{1-2l} <= eps0/(m(1-2l))) U_{S,0}(t,r0) psi ||
/// on a geometric grid spanning [r0, t_max] (default 10^3 r0) with n_fit
/// samples and fits the slope over t >= 4 r0 (early-transient exclusion).
/// States with more than 1e-10 momentum mass below |p| = 2 eps0 are outside
/// the guaranteed-decay class; that is logged, not thrown, so negative
/// controls can run.  FitError if the values underflow before enough samples
/// survive.
DecayFit free_min_velocity_decay(const OscillatorModel& model,
                                 const WaveFunction& psi, double eps0,
                                 int n_fit = 24, double t_max = 0.0);

/// Multiplier-vs-band commutator decay probe on a fixed state.  With spec:
///   || h(|x|/t^rho) (V(t, t^l x) phi1(p^2) psi - phi1(p^2) V(t, t^l x) psi) ||
/// over the given times.  With spec null, the probe commutes the window with
/// the band directly:
///   || h(|x|/t^rho) phi1(p^2) psi - phi1(p^2) h(|x|/t^rho) psi ||.
/// h must vanish near the origin (bandpass or rising cutoff).  Returns the
/// fitted slope; a numerically zero series yields slope -infinity with
/// all_below_floor set instead of an error.
DecayFit commutator_decay_probe(const OscillatorModel& model,
                                const PotentialSpec* spec, const CutoffSpec& h,
                                double rho_probe, const WaveFunction& psi,
                                const std::vector<double>& times,
                                const EstimateConfig& cfg);

/// Contract ceiling for the potential-commutator probe: with the scaled decay
/// index rho_S = rho (1 - lambda) - 1, the fitted exponent should not exceed
///   -(rho_S + 1)(rho_probe + lambda) + lambda
/// up to fit slack.
double predicted_commutator_exponent(double rho_potential, double lambda,
                                     double rho_probe);

}  // namespace tdho
