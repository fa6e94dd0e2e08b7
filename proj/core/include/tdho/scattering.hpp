#pragma once

#include "tdho/cutoffs.hpp"
#include "tdho/propagator.hpp"

#include <vector>

namespace tdho {

/// Cutoff parameters shared by the range diagnostics: the momentum window
/// (kappa1, R1) feeding the bandpass phi1(p^2) and the spatial ramp scale
/// kappa2 feeding phi2(x^2 / t^{2 rho_lambda}).
struct RangeCutoffs {
  double kappa1 = 0.0;
  double R1 = 0.0;
  double kappa2 = 0.0;

  static RangeCutoffs make(double kappa1, double R1, double kappa2);
  CutoffSpec phi1() const { return CutoffSpec::bandpass(kappa1, 2.0 * kappa1, 0.5 * R1, R1); }
  CutoffSpec phi2() const { return CutoffSpec::ramp(kappa2, 2.0 * kappa2); }
};

/// Horizon-doubling approximation of a strong limit: approximants at
/// T_k = r0 * 2^k, with the L2 gap between consecutive horizons recorded.
struct WaveOpReport {
  std::vector<double> horizons;
  std::vector<double> cauchy_gaps;
  WaveFunction result;
  bool converged = false;
};

/// Range-membership evidence: both defect sequences over the sample times,
/// and the verdict (final defects at most tol and nonincreasing tails).
struct RangeReport {
  std::vector<double> times;
  std::vector<double> w1_defect;
  std::vector<double> w2_defect;
  bool member = false;
  double tol = 0.0;
};

struct CompletenessReport {
  WaveOpReport forward;
  RangeReport membership;
  WaveOpReport inverse;
  double roundtrip_error = 0.0;
};

/// || V(t, t^lambda x) U_{S,0}(t, r0) psi ||.  The state must be admissible:
/// momentum mass below |p| = eps0 under 1e-10 (PreconditionError otherwise).
double cook_integrand(const OscillatorModel& model, const PotentialSpec& spec,
                      const WaveFunction& psi, double t, double eps0);

/// Numerical integral of the Cook integrand over [t_lo, t_hi] (trapezoid in
/// log t); bounds the Cauchy gap of the corresponding wave-operator leg.
double cook_tail_bound(const OscillatorModel& model, const PotentialSpec& spec,
                       const WaveFunction& psi, double t_lo, double t_hi,
                       double eps0, int per_octave = 16);

/// Forward scattering map: U_S(T,r0)^* U_{S,0}(T,r0) psi over doubling
/// horizons, stopping once the gap falls below tol or k_max is reached.
/// Unconverged runs return converged=false rather than throwing.
WaveOpReport wave_operator_forward(const OscillatorModel& model,
                                   const PotentialSpec& spec, const WaveFunction& psi,
                                   double tol, const StepPolicy& policy, double eps0,
                                   int k_max = 10);

/// Inverse map: U_{S,0}(T,r0)^* U_S(T,r0) phi with the propagator roles
/// exchanged.  When warn_cutoffs is given, range membership of phi is checked
/// first and a warning is logged (never a failure) if it does not hold.
WaveOpReport wave_operator_inverse(const OscillatorModel& model,
                                   const PotentialSpec& spec, const WaveFunction& phi,
                                   double tol, const StepPolicy& policy,
                                   int k_max = 10,
                                   const RangeCutoffs* warn_cutoffs = nullptr,
                                   double membership_tol = 1e-2);

/// Defect sequences ||(1 - phi1(p^2)) U_S(t,r0) psi|| and
/// ||(1 - phi2(x^2/t^{2 rho_lambda})) U_S(t,r0) psi|| over the given times
/// (increasing, all >= r0).  Never throws on non-membership.
RangeReport range_membership(const OscillatorModel& model, const PotentialSpec& spec,
                             const WaveFunction& psi, const RangeCutoffs& cutoffs,
                             const std::vector<double>& times, double tol,
                             const StepPolicy& policy);

/// Forward map, membership of the image, inverse map, and the round-trip
/// error ||W_inv(W_fwd psi) - psi||.
CompletenessReport completeness_roundtrip(const OscillatorModel& model,
                                          const PotentialSpec& spec,
                                          const WaveFunction& psi,
                                          const RangeCutoffs& cutoffs, double tol,
                                          const StepPolicy& policy, double eps0,
                                          int k_max = 8);

/// Full-frame wave operator assembled from the dressed pieces:
/// U(r0,0)^* M(r0) W_fwd M(r0)^{-1} U_0(r0,0) psi.  The admissibility gate is
/// applied to psi itself (full-frame data); the inner scaled-frame run is
/// taken on the undressed state without re-gating, since the dressing phase
/// legitimately spreads its momentum support.
WaveFunction compose_full_wave_operator(const OscillatorModel& model,
                                        const PotentialSpec& spec,
                                        const WaveFunction& psi, double tol,
                                        const StepPolicy& policy, double eps0,
                                        int k_max = 6);

}  // namespace tdho
