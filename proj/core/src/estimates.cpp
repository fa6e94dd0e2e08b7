#include "tdho/estimates.hpp"

#include "tdho/errors.hpp"
#include "tdho/logging.hpp"
#include "tdho/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace tdho {

namespace {

constexpr double kFitFloor = 1e-13;

double drift_power(const OscillatorModel& model) { return 1.0 - 2.0 * model.lambda; }

double eps5_window_hi(const EstimateConfig& cfg, const OscillatorModel& model) {
  return cfg.kappa1 / (model.m * drift_power(model) * std::sqrt(cfg.R1));
}

WaveFunction apply_band(const WaveFunction& psi, const CutoffSpec& band) {
  return apply_fourier_multiplier(psi, [&band](const std::array<double, 2>& p) {
    return cdouble(band.eval(p[0] * p[0] + p[1] * p[1]), 0.0);
  });
}

/// Multiplies by w(|x| / scale) on the position lattice.
WaveFunction apply_radial_window(const WaveFunction& psi, const CutoffSpec& w,
                                 double scale) {
  return apply_position_multiplier(psi, [&w, scale](const std::array<double, 2>& x) {
    return cdouble(w.eval(std::hypot(x[0], x[1]) / scale), 0.0);
  });
}

/// Evolves psi through the sample times in the scaled frame (exact multiplier
/// when spec is null) and invokes visit at each sample.
void sweep_scaled(const OscillatorModel& model, const PotentialSpec* spec,
                  const WaveFunction& psi, const std::vector<double>& times,
                  const StepPolicy& policy,
                  const std::function<void(double, const WaveFunction&)>& visit) {
  WaveFunction state = psi;
  double t_prev = model.r0;
  for (double t : times) {
    if (t > t_prev) {
      state = spec ? evolve_S(model, spec, state, t_prev, t, policy)
                   : evolve_free_S(model, state, t_prev, t);
      t_prev = t;
    }
    visit(t, state);
  }
}

IntegralSeries integrate_log_measure(std::vector<double> times,
                                     std::vector<double> integrand) {
  IntegralSeries series;
  series.times = std::move(times);
  series.integrand = std::move(integrand);
  series.partial.resize(series.times.size(), 0.0);
  for (size_t i = 1; i < series.times.size(); ++i) {
    const double du = std::log(series.times[i] / series.times[i - 1]);
    series.partial[i] = series.partial[i - 1] +
                        0.5 * du * (series.integrand[i] + series.integrand[i - 1]);
  }
  series.bound_estimate = series.partial.empty() ? 0.0 : series.partial.back();
  return series;
}

/// Shared fit assembly.  zero_ok selects the numerically-zero escape hatch
/// (slope -infinity) instead of a FitError; begin_fit excludes an early
/// transient from the regression.
DecayFit assemble_fit(std::vector<double> times, std::vector<double> values,
                      double begin_fit, bool zero_ok) {
  DecayFit fit;
  fit.times = std::move(times);
  fit.values = std::move(values);
  const double peak = fit.values.empty()
                          ? 0.0
                          : *std::max_element(fit.values.begin(), fit.values.end());
  if (peak <= kFitFloor) {
    if (!zero_ok) throw FitError("decay fit: all samples below the floor");
    fit.all_below_floor = true;
    fit.slope = -std::numeric_limits<double>::infinity();
    return fit;
  }
  std::vector<double> ts, vs;
  for (size_t i = 0; i < fit.times.size(); ++i) {
    if (fit.times[i] >= begin_fit && fit.values[i] > kFitFloor) {
      ts.push_back(fit.times[i]);
      vs.push_back(fit.values[i]);
    }
  }
  fit.slope = fit_loglog_slope(ts, vs);
  return fit;
}

}  // namespace

EstimateConfig EstimateConfig::make(const OscillatorModel& model, double t_max,
                                    int per_octave) {
  if (per_octave < 1) throw ValidationError("EstimateConfig: per_octave must be >= 1");
  EstimateConfig cfg;
  if (t_max <= 0.0) t_max = model.r0 * 1024.0;
  if (t_max <= model.r0)
    throw ValidationError("EstimateConfig: t_max must exceed r0");
  const double ratio = std::pow(2.0, 1.0 / per_octave);
  double t = model.r0;
  while (t < t_max * (1.0 - 1e-12)) {
    cfg.times.push_back(t);
    t *= ratio;
  }
  cfg.times.push_back(t_max);
  cfg.finalize(model);
  return cfg;
}

void EstimateConfig::finalize(const OscillatorModel& model) {
  theta = 2.0 * std::sqrt(R1) / (model.m * drift_power(model));
  eps4 = eps3 + eps;
  if (eps5 == 0.0) eps5 = 0.5 * (3.0 * eps + eps2 + eps5_window_hi(*this, model));
  validate(model);
}

void EstimateConfig::validate(const OscillatorModel& model) const {
  RangeCutoffs::make(kappa1, R1, kappa2);  // positivity and band-width checks
  if (eps <= 0.0) throw ValidationError("EstimateConfig: eps must be positive");
  if (!(eps2 > eps)) throw ValidationError("EstimateConfig: need eps2 > eps");
  if (!(eps3 > 2.0 * eps)) throw ValidationError("EstimateConfig: need eps3 > 2 eps");
  if (!(eta0 > 2.0 * eps)) throw ValidationError("EstimateConfig: need eta0 > 2 eps");
  if (std::abs(eps4 - (eps3 + eps)) > 1e-12 * std::max(1.0, eps4))
    throw ValidationError("EstimateConfig: eps4 must equal eps3 + eps");
  const double lo = 3.0 * eps + eps2;
  const double hi = eps5_window_hi(*this, model);
  if (!(lo < eps5 && eps5 < hi))
    throw ValidationError("EstimateConfig: eps5 outside (" + std::to_string(lo) +
                          ", " + std::to_string(hi) + ")");
  const double theta_want = 2.0 * std::sqrt(R1) / (model.m * drift_power(model));
  if (std::abs(theta - theta_want) > 1e-12 * theta_want)
    throw ValidationError("EstimateConfig: theta is derived; call finalize");
  if (times.empty()) throw ValidationError("EstimateConfig: empty time grid");
  if (times.front() < model.r0 * (1.0 - 1e-12))
    throw ValidationError("EstimateConfig: times must start at or after r0");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw ValidationError("EstimateConfig: times must increase");
}

RangeCutoffs EstimateConfig::range_cutoffs() const {
  return RangeCutoffs::make(kappa1, R1, kappa2);
}

double fit_loglog_slope(const std::vector<double>& times,
                        const std::vector<double>& values, double floor_value) {
  if (times.size() != values.size())
    throw ValidationError("fit_loglog_slope: length mismatch");
  double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (!(values[i] > floor_value)) continue;
    const double u = std::log(times[i]);
    const double v = std::log(values[i]);
    su += u;
    sv += v;
    suu += u * u;
    suv += u * v;
    ++n;
  }
  if (n < 4) throw FitError("fit_loglog_slope: fewer than four usable samples");
  const double denom = n * suu - su * su;
  if (denom <= 0.0) throw FitError("fit_loglog_slope: degenerate abscissae");
  return (n * suv - su * sv) / denom;
}

IntegralSeries large_velocity_integral(const OscillatorModel& model,
                                       const PotentialSpec* spec,
                                       const WaveFunction& psi,
                                       const EstimateConfig& cfg,
                                       const StepPolicy& policy) {
  cfg.validate(model);
  const CutoffSpec band = cfg.phi1();
  const CutoffSpec window = CutoffSpec::bandpass(
      cfg.theta, cfg.theta + cfg.eps, cfg.theta + cfg.eta0 - cfg.eps,
      cfg.theta + cfg.eta0);
  const double power = drift_power(model);
  std::vector<double> integrand;
  integrand.reserve(cfg.times.size());
  sweep_scaled(model, spec, psi, cfg.times, policy,
               [&](double t, const WaveFunction& state) {
                 const WaveFunction cut = apply_radial_window(
                     apply_band(state, band), window, std::pow(t, power));
                 integrand.push_back(norm2(cut));
               });
  return integrate_log_measure(cfg.times, std::move(integrand));
}

IntegralSeries middle_velocity_integral(const OscillatorModel& model,
                                        const PotentialSpec* spec,
                                        const WaveFunction& psi,
                                        const EstimateConfig& cfg,
                                        const StepPolicy& policy) {
  cfg.validate(model);
  const CutoffSpec band = cfg.phi1();
  const CutoffSpec window = CutoffSpec::bandpass(
      cfg.eps2, cfg.eps2 + cfg.eps, cfg.theta + cfg.eps3 - cfg.eps,
      cfg.theta + cfg.eps3);
  const double power = drift_power(model);
  std::vector<double> integrand;
  integrand.reserve(cfg.times.size());
  sweep_scaled(
      model, spec, psi, cfg.times, policy,
      [&](double t, const WaveFunction& state) {
        const double scale = std::pow(t, power);
        const WaveFunction cut =
            apply_radial_window(apply_band(state, band), window, scale);
        const double c = model.m * power / scale;
        double total = 0.0;
        for (int axis = 0; axis < cut.grid.dim; ++axis) {
          const WaveFunction px = apply_fourier_multiplier(
              cut, [axis](const std::array<double, 2>& p) {
                return cdouble(p[axis], 0.0);
              });
          const WaveFunction cx = apply_position_multiplier(
              cut, [axis, c](const std::array<double, 2>& x) {
                return cdouble(c * x[axis], 0.0);
              });
          total += norm2(px - cx);
        }
        integrand.push_back(total);
      });
  return integrate_log_measure(cfg.times, std::move(integrand));
}

DecayProfile minimal_velocity_profile(const OscillatorModel& model,
                                      const PotentialSpec* spec,
                                      const WaveFunction& psi,
                                      const EstimateConfig& cfg, double tol,
                                      const StepPolicy& policy) {
  cfg.validate(model);
  const CutoffSpec interior = CutoffSpec::below(cfg.eps5, cfg.eps);
  const CutoffSpec band = cfg.phi1();
  const CutoffSpec ramp = cfg.range_cutoffs().phi2();
  const double power = drift_power(model);
  const double rho_l = model.lambda * power;

  DecayProfile profile;
  profile.times = cfg.times;
  profile.tol = tol;
  double w1_final = 0.0, w2_final = 0.0;
  sweep_scaled(model, spec, psi, cfg.times, policy,
               [&](double t, const WaveFunction& state) {
                 profile.values.push_back(norm(apply_radial_window(
                     state, interior, std::pow(t, power))));
                 const WaveFunction band_defect = apply_fourier_multiplier(
                     state, [&band](const std::array<double, 2>& p) {
                       return cdouble(1.0 - band.eval(p[0] * p[0] + p[1] * p[1]),
                                      0.0);
                     });
                 const double spread = std::pow(t, 2.0 * rho_l);
                 const WaveFunction ramp_defect = apply_position_multiplier(
                     state, [&ramp, spread](const std::array<double, 2>& x) {
                       const double r2 = x[0] * x[0] + x[1] * x[1];
                       return cdouble(1.0 - ramp.eval(r2 / spread), 0.0);
                     });
                 w1_final = norm(band_defect);
                 w2_final = norm(ramp_defect);
               });
  const double warn_at = 0.05 * norm(psi);
  if (w1_final > warn_at || w2_final > warn_at)
    log::info("minimal_velocity_profile: state looks outside the scattering "
              "range (final membership defects " + std::to_string(w1_final) +
              ", " + std::to_string(w2_final) + ")");

  const size_t n = profile.values.size();
  if (n >= 3) {
    const bool falling = profile.values[n - 3] > profile.values[n - 2] &&
                         profile.values[n - 2] > profile.values[n - 1];
    profile.decaying = falling && profile.values.back() <= tol;
  }
  return profile;
}

DecayFit free_min_velocity_decay(const OscillatorModel& model,
                                 const WaveFunction& psi, double eps0,
                                 int n_fit, double t_max) {
  if (eps0 <= 0.0) throw ValidationError("free_min_velocity_decay: eps0 > 0");
  if (n_fit < 8) throw ValidationError("free_min_velocity_decay: n_fit >= 8");
  if (t_max == 0.0) t_max = 1e3 * model.r0;
  if (t_max < 8.0 * model.r0)
    throw ValidationError("free_min_velocity_decay: t_max >= 8 r0");
  const double slow_mass = low_momentum_mass(psi, 2.0 * eps0);
  if (slow_mass > 1e-10)
    log::info("free_min_velocity_decay: momentum mass " +
              std::to_string(slow_mass) + " below |p| = " +
              std::to_string(2.0 * eps0) +
              "; decay is not guaranteed for this state");

  const double power = drift_power(model);
  const double threshold = eps0 / (model.m * power);
  const CutoffSpec interior = CutoffSpec::below(threshold, 0.25 * threshold);
  const double span = t_max / model.r0;
  std::vector<double> times(n_fit), values(n_fit);
  for (int i = 0; i < n_fit; ++i) {
    const double t = model.r0 * std::pow(span, double(i) / (n_fit - 1));
    times[i] = t;
    const WaveFunction state = evolve_free_S(model, psi, model.r0, t);
    values[i] = norm(apply_radial_window(state, interior, std::pow(t, power)));
  }
  return assemble_fit(std::move(times), std::move(values), 4.0 * model.r0,
                      /*zero_ok=*/false);
}

DecayFit commutator_decay_probe(const OscillatorModel& model,
                                const PotentialSpec* spec, const CutoffSpec& h,
                                double rho_probe, const WaveFunction& psi,
                                const std::vector<double>& times,
                                const EstimateConfig& cfg) {
  if (times.size() < 4)
    throw ValidationError("commutator_decay_probe: need at least four times");
  if (rho_probe <= 0.0)
    throw ValidationError("commutator_decay_probe: rho_probe must be positive");
  if (spec && std::abs(spec->lambda_ref - model.lambda) > 1e-12)
    throw ValidationError(
        "commutator_decay_probe: potential built for a different exponent");
  const CutoffSpec band = cfg.phi1();
  const WaveFunction banded = apply_band(psi, band);
  std::vector<double> values;
  values.reserve(times.size());
  for (double t : times) {
    const double scale = std::pow(t, rho_probe);
    WaveFunction defect = psi;
    if (spec) {
      // h(|x|/t^rho) [ V(t, t^l x), phi1(p^2) ] psi
      const std::vector<double> v = potential_eval(*spec, t, psi.grid, true);
      WaveFunction lhs = banded;
      for (size_t i = 0; i < lhs.amp.size(); ++i) lhs.amp[i] *= v[i];
      WaveFunction rhs = psi;
      for (size_t i = 0; i < rhs.amp.size(); ++i) rhs.amp[i] *= v[i];
      defect = apply_radial_window(lhs - apply_band(rhs, band), h, scale);
    } else {
      // [ h(|x|/t^rho), phi1(p^2) ] psi
      defect = apply_radial_window(banded, h, scale) -
               apply_band(apply_radial_window(psi, h, scale), band);
    }
    values.push_back(norm(defect));
  }
  return assemble_fit(times, std::move(values), times.front(), /*zero_ok=*/true);
}

double predicted_commutator_exponent(double rho_potential, double lambda,
                                     double rho_probe) {
  const double rho_s = rho_potential * (1.0 - lambda) - 1.0;
  return -(rho_s + 1.0) * (rho_probe + lambda) + lambda;
}

}  // namespace tdho
