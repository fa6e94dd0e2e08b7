#include "tdho/scattering.hpp"

#include "tdho/logging.hpp"
#include "tdho/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tdho {

RangeCutoffs RangeCutoffs::make(double kappa1, double R1, double kappa2) {
  if (!(kappa1 > 0.0) || !(R1 >= 4.0 * kappa1))
    throw ValidationError("range cutoffs need 0 < kappa1 and R1 >= 4 kappa1");
  if (!(kappa2 > 0.0)) throw ValidationError("range cutoffs need kappa2 > 0");
  return RangeCutoffs{kappa1, R1, kappa2};
}

namespace {

constexpr double kGateMass = 1e-10;

void admissibility_gate(const WaveFunction& psi, double eps0) {
  if (!(eps0 > 0.0)) throw DomainError("admissibility gate needs eps0 > 0");
  if (norm2(psi) == 0.0) return;
  const double low = low_momentum_mass(psi, eps0);
  if (low > kGateMass)
    throw PreconditionError("low-momentum mass " + std::to_string(low) +
                            " exceeds the admissibility gate");
}

double integrand_ungated(const OscillatorModel& model, const PotentialSpec& spec,
                         const WaveFunction& psi, double t) {
  const WaveFunction freed = evolve_free_S(model, psi, model.r0, t);
  const std::vector<double> v = potential_eval(spec, t, psi.grid, true);
  double acc = 0.0;
  for (std::size_t i = 0; i < freed.amp.size(); ++i)
    acc += v[i] * v[i] * std::norm(freed.amp[i]);
  return std::sqrt(acc * psi.grid.cell_volume());
}

WaveOpReport forward_ungated(const OscillatorModel& model, const PotentialSpec& spec,
                             const WaveFunction& psi, double tol,
                             const StepPolicy& policy, int k_max) {
  WaveOpReport rep;
  rep.horizons.push_back(model.r0);
  rep.result = psi;
  WaveFunction prev = psi;
  for (int k = 1; k <= k_max; ++k) {
    const double horizon = model.r0 * std::pow(2.0, k);
    const WaveFunction freed = evolve_free_S(model, psi, model.r0, horizon);
    WaveFunction cand = evolve_S(model, &spec, freed, horizon, model.r0, policy);
    const double gap = distance(cand, prev);
    rep.horizons.push_back(horizon);
    rep.cauchy_gaps.push_back(gap);
    log::info("forward wave operator: T=" + std::to_string(horizon) +
              " gap=" + std::to_string(gap));
    prev = std::move(cand);
    if (gap <= tol) {
      rep.converged = true;
      break;
    }
  }
  rep.result = std::move(prev);
  return rep;
}

// Entries below `floor` sit in the numerical noise of the evolved state, where
// strict monotonicity is meaningless; only increases above the floor count.
bool tail_nonincreasing(const std::vector<double>& v, double floor) {
  if (v.size() < 3) return false;
  const std::size_t last = v.size() - 1;
  for (std::size_t i = last - 2; i < last; ++i)
    if (v[i + 1] > std::max(v[i] * (1.0 + 1e-9) + 1e-12, floor)) return false;
  return true;
}

}  // namespace

double cook_integrand(const OscillatorModel& model, const PotentialSpec& spec,
                      const WaveFunction& psi, double t, double eps0) {
  if (!(t >= model.r0)) throw DomainError("cook integrand needs t >= r0");
  admissibility_gate(psi, eps0);
  return integrand_ungated(model, spec, psi, t);
}

double cook_tail_bound(const OscillatorModel& model, const PotentialSpec& spec,
                       const WaveFunction& psi, double t_lo, double t_hi,
                       double eps0, int per_octave) {
  if (!(model.r0 <= t_lo) || !(t_lo < t_hi))
    throw DomainError("cook tail bound needs r0 <= t_lo < t_hi");
  admissibility_gate(psi, eps0);
  const double octaves = std::log2(t_hi / t_lo);
  const int cells = std::max(4, static_cast<int>(std::ceil(per_octave * octaves)));
  const double du = std::log(t_hi / t_lo) / cells;
  // trapezoid in u = log t of f(t) * t
  double acc = 0.0;
  double prev = integrand_ungated(model, spec, psi, t_lo) * t_lo;
  for (int i = 1; i <= cells; ++i) {
    const double t = t_lo * std::exp(du * i);
    const double cur = integrand_ungated(model, spec, psi, t) * t;
    acc += 0.5 * du * (prev + cur);
    prev = cur;
  }
  return acc;
}

WaveOpReport wave_operator_forward(const OscillatorModel& model,
                                   const PotentialSpec& spec, const WaveFunction& psi,
                                   double tol, const StepPolicy& policy, double eps0,
                                   int k_max) {
  if (k_max < 1) throw DomainError("horizon count must be at least 1");
  admissibility_gate(psi, eps0);
  return forward_ungated(model, spec, psi, tol, policy, k_max);
}

WaveOpReport wave_operator_inverse(const OscillatorModel& model,
                                   const PotentialSpec& spec, const WaveFunction& phi,
                                   double tol, const StepPolicy& policy, int k_max,
                                   const RangeCutoffs* warn_cutoffs,
                                   double membership_tol) {
  if (k_max < 1) throw DomainError("horizon count must be at least 1");
  if (warn_cutoffs) {
    std::vector<double> times;
    for (int k = 0; k <= std::min(k_max, 6); ++k)
      times.push_back(model.r0 * std::pow(2.0, k));
    const RangeReport check = range_membership(model, spec, phi, *warn_cutoffs,
                                               times, membership_tol, policy);
    if (!check.member)
      log::info("inverse wave operator input failed the range-membership check; "
                "the limit may not converge");
  }
  WaveOpReport rep;
  rep.horizons.push_back(model.r0);
  rep.result = phi;
  WaveFunction running = phi;  // U_S(t, r0) phi, extended leg by leg
  WaveFunction prev = phi;
  double reached = model.r0;
  for (int k = 1; k <= k_max; ++k) {
    const double horizon = model.r0 * std::pow(2.0, k);
    running = evolve_S(model, &spec, running, reached, horizon, policy);
    reached = horizon;
    WaveFunction cand = evolve_free_S(model, running, horizon, model.r0);
    const double gap = distance(cand, prev);
    rep.horizons.push_back(horizon);
    rep.cauchy_gaps.push_back(gap);
    log::info("inverse wave operator: T=" + std::to_string(horizon) +
              " gap=" + std::to_string(gap));
    prev = std::move(cand);
    if (gap <= tol) {
      rep.converged = true;
      break;
    }
  }
  rep.result = std::move(prev);
  return rep;
}

RangeReport range_membership(const OscillatorModel& model, const PotentialSpec& spec,
                             const WaveFunction& psi, const RangeCutoffs& cutoffs,
                             const std::vector<double>& times, double tol,
                             const StepPolicy& policy) {
  if (times.size() < 3) throw DomainError("membership check needs at least 3 times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < model.r0 || (i > 0 && times[i] <= times[i - 1]))
      throw DomainError("membership times must be increasing and >= r0");
  }
  const CutoffSpec phi1 = cutoffs.phi1();
  const CutoffSpec phi2 = cutoffs.phi2();
  const double rho_l = model.lambda * (1.0 - 2.0 * model.lambda);

  RangeReport rep;
  rep.times = times;
  rep.tol = tol;
  WaveFunction state = psi;
  double reached = model.r0;
  const Grid& g = psi.grid;
  for (double t : times) {
    if (t > reached) {
      state = evolve_S(model, &spec, state, reached, t, policy);
      reached = t;
    }
    // momentum-side defect against the bandpass
    std::vector<cdouble> coeffs = to_momentum(state);
    double acc1 = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      double p2;
      if (g.dim == 1) {
        const double p = g.momentum_sorted(static_cast<int>(i));
        p2 = p * p;
      } else {
        const double q = g.momentum_sorted(static_cast<int>(i) / g.n);
        const double p = g.momentum_sorted(static_cast<int>(i) % g.n);
        p2 = p * p + q * q;
      }
      const double w = 1.0 - phi1.eval(p2);
      acc1 += w * w * std::norm(coeffs[i]);
    }
    const double dual_volume = std::pow(g.dp(), g.dim);
    rep.w1_defect.push_back(std::sqrt(acc1 * dual_volume));

    // position-side defect against the spatial ramp at scale t^{rho_lambda}
    const double scale = std::pow(t, 2.0 * rho_l);
    double acc2 = 0.0;
    for (std::size_t i = 0; i < state.amp.size(); ++i) {
      double r2;
      if (g.dim == 1) {
        const double x = g.position(static_cast<int>(i));
        r2 = x * x;
      } else {
        const double y = g.position(static_cast<int>(i) / g.n);
        const double x = g.position(static_cast<int>(i) % g.n);
        r2 = x * x + y * y;
      }
      const double w = 1.0 - phi2.eval(r2 / scale);
      acc2 += w * w * std::norm(state.amp[i]);
    }
    rep.w2_defect.push_back(std::sqrt(acc2 * g.cell_volume()));
  }

  const bool small = rep.w1_defect.back() <= tol && rep.w2_defect.back() <= tol;
  const double floor = 0.1 * tol;
  rep.member = small && tail_nonincreasing(rep.w1_defect, floor) &&
               tail_nonincreasing(rep.w2_defect, floor);
  return rep;
}

CompletenessReport completeness_roundtrip(const OscillatorModel& model,
                                          const PotentialSpec& spec,
                                          const WaveFunction& psi,
                                          const RangeCutoffs& cutoffs, double tol,
                                          const StepPolicy& policy, double eps0,
                                          int k_max) {
  CompletenessReport rep;
  rep.forward = wave_operator_forward(model, spec, psi, tol, policy, eps0, k_max);
  std::vector<double> times;
  const int samples = std::max(4, k_max);
  for (int k = 0; k <= samples; ++k) times.push_back(model.r0 * std::pow(2.0, k));
  rep.membership = range_membership(model, spec, rep.forward.result, cutoffs, times,
                                    tol, policy);
  rep.inverse = wave_operator_inverse(model, spec, rep.forward.result, tol, policy,
                                      k_max);
  rep.roundtrip_error = distance(rep.inverse.result, psi);
  return rep;
}

WaveFunction compose_full_wave_operator(const OscillatorModel& model,
                                        const PotentialSpec& spec,
                                        const WaveFunction& psi, double tol,
                                        const StepPolicy& policy, double eps0,
                                        int k_max) {
  admissibility_gate(psi, eps0);
  const double r0 = model.r0;
  WaveFunction chi = quadratic_momentum_phase(psi, -r0 / (2.0 * model.m));
  chi.time_tag = r0;
  chi = dressing_apply(model, chi, r0, true);
  const WaveOpReport rep = forward_ungated(model, spec, chi, tol, policy, k_max);
  if (!rep.converged)
    log::info("composed wave operator: scaled limit unconverged at the last horizon");
  chi = dressing_apply(model, rep.result, r0, false);
  return evolve_full(model, &spec, chi, r0, 0.0, policy);
}

}  // namespace tdho
