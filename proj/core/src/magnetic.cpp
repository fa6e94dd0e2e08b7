#include "tdho/magnetic.hpp"

#include "tdho/fft.hpp"
#include "tdho/logging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace tdho {

namespace {

constexpr double kGuardMass = 1e-12;
constexpr double kMaxSubRotation = std::numbers::pi / 4.0;

void require_2d(const Grid& grid, const char* who) {
  if (grid.dim != 2) throw DomainError(std::string(who) + ": 2D grid required");
}

double mass_outside_radius(const WaveFunction& psi, double radius) {
  const Grid& g = psi.grid;
  const double r2_cut = radius * radius;
  double outside = 0.0, total = 0.0;
  for (int r = 0; r < g.n; ++r) {
    const double y = g.position(r);
    for (int c = 0; c < g.n; ++c) {
      const double x = g.position(c);
      const double w = std::norm(psi.amp[static_cast<std::size_t>(r) * g.n + c]);
      total += w;
      if (x * x + y * y > r2_cut) outside += w;
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

double momentum_mass_outside_radius(const WaveFunction& psi, double radius) {
  const Grid& g = psi.grid;
  std::vector<cdouble> coeffs = psi.amp;
  fft::transform_all(coeffs.data(), g.dim, g.n, fft::forward);
  const double r2_cut = radius * radius;
  double outside = 0.0, total = 0.0;
  for (int r = 0; r < g.n; ++r) {
    const double q = g.momentum_wrapped(r);
    for (int c = 0; c < g.n; ++c) {
      const double p = g.momentum_wrapped(c);
      const double w = std::norm(coeffs[static_cast<std::size_t>(r) * g.n + c]);
      total += w;
      if (p * p + q * q > r2_cut) outside += w;
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

/// In-place substitution x_axis <- x_axis + factor * x_other: a per-line
/// spectral translation (unnormalized transforms; the 1/n rides on the phase).
void shear(std::vector<cdouble>& amp, const Grid& grid, int axis, double factor) {
  const int n = grid.n;
  fft::transform_axis(amp.data(), n, axis, fft::forward);
  const double inv_n = 1.0 / n;
  if (axis == 0) {
    for (int j = 0; j < n; ++j) {
      const double p = grid.momentum_wrapped(j);
      for (int c = 0; c < n; ++c) {
        const double shift = factor * grid.position(c);
        amp[static_cast<std::size_t>(j) * n + c] *= std::polar(inv_n, p * shift);
      }
    }
  } else {
    for (int r = 0; r < n; ++r) {
      const double shift = factor * grid.position(r);
      for (int j = 0; j < n; ++j) {
        const double p = grid.momentum_wrapped(j);
        amp[static_cast<std::size_t>(r) * n + j] *= std::polar(inv_n, p * shift);
      }
    }
  }
  fft::transform_axis(amp.data(), n, axis, fft::backward);
}

/// e^{i angle L} without margin checks; callers keep |angle| small or guard.
void rotate_triple(std::vector<cdouble>& amp, const Grid& grid, double angle) {
  if (angle == 0.0) return;
  const double a = -std::tan(0.5 * angle);
  const double b = std::sin(angle);
  shear(amp, grid, 0, a);
  shear(amp, grid, 1, b);
  shear(amp, grid, 0, a);
}

/// Support growth of the intermediate shear images relative to the state's
/// circumscribed radius.
double shear_growth(double angle) {
  const double a = std::abs(std::tan(0.5 * angle));
  const double b = std::abs(std::sin(angle));
  return 1.0 + 2.0 * a + a * b * (1.0 + a);
}

struct BPlan {
  const MagneticModel* mm = nullptr;
  const PotentialSpec* pot = nullptr;
  Grid grid;
  std::vector<double> r2;
  std::vector<double> p2;
  std::vector<double> vprofile;  // time-independent radial factor of V
};

BPlan make_bplan(const MagneticModel& mm, const PotentialSpec* pot,
                 const Grid& grid) {
  BPlan plan;
  plan.mm = &mm;
  plan.pot = pot;
  plan.grid = grid;
  plan.r2.resize(grid.size());
  plan.p2.resize(grid.size());
  for (int r = 0; r < grid.n; ++r) {
    const double y = grid.position(r);
    const double q = grid.momentum_wrapped(r);
    for (int c = 0; c < grid.n; ++c) {
      const double x = grid.position(c);
      const double p = grid.momentum_wrapped(c);
      const std::size_t idx = static_cast<std::size_t>(r) * grid.n + c;
      plan.r2[idx] = x * x + y * y;
      plan.p2[idx] = p * p + q * q;
    }
  }
  if (pot) {
    plan.vprofile.resize(grid.size());
    for (std::size_t i = 0; i < plan.r2.size(); ++i)
      plan.vprofile[i] = pot->decay_factor(plan.r2[i]);
  }
  return plan;
}

void b_step(const BPlan& plan, std::vector<cdouble>& amp, double t, double h) {
  const double t_mid = t + 0.5 * h;
  const double km = 0.5 * plan.mm->oscillator.coefficient(t_mid);
  const double c = -0.5 * h;
  if (plan.pot) {
    const double va = plan.pot->amplitude(t_mid);
    for (std::size_t i = 0; i < amp.size(); ++i)
      amp[i] *= std::polar(1.0, c * (km * plan.r2[i] + va * plan.vprofile[i]));
  } else {
    for (std::size_t i = 0; i < amp.size(); ++i)
      amp[i] *= std::polar(1.0, c * km * plan.r2[i]);
  }

  const double factor = -h / (2.0 * plan.mm->m);
  fft::transform_all(amp.data(), plan.grid.dim, plan.grid.n, fft::forward);
  const double inv_total = 1.0 / static_cast<double>(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i)
    amp[i] *= std::polar(inv_total, factor * plan.p2[i]);
  fft::transform_all(amp.data(), plan.grid.dim, plan.grid.n, fft::backward);

  rotate_triple(amp, plan.grid,
                h * plan.mm->q * plan.mm->field(t_mid) / (2.0 * plan.mm->m));

  if (plan.pot) {
    const double va = plan.pot->amplitude(t_mid);
    for (std::size_t i = 0; i < amp.size(); ++i)
      amp[i] *= std::polar(1.0, c * (km * plan.r2[i] + va * plan.vprofile[i]));
  } else {
    for (std::size_t i = 0; i < amp.size(); ++i)
      amp[i] *= std::polar(1.0, c * km * plan.r2[i]);
  }
}

WaveFunction run_fixed(const BPlan& plan, WaveFunction psi, double t0, double t1,
                       double dt_nominal) {
  if (t0 == t1) return psi;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double eps = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
  double t = t0;
  while (dir * (t1 - t) > eps) {
    const double dt = std::min(dt_nominal, dir * (t1 - t));
    b_step(plan, psi.amp, t, dir * dt);
    t += dir * dt;
  }
  psi.time_tag = t1;
  return psi;
}

WaveFunction evolve_segment(const BPlan& plan, const WaveFunction& psi, double t0,
                            double t1, const StepPolicy& policy) {
  if (t0 == t1) return psi;
  const double span = std::abs(t1 - t0);
  const double budget = policy.error_target * span;
  double dt = std::min(policy.dt_max, span);
  WaveFunction coarse = run_fixed(plan, psi, t0, t1, dt);
  if (policy.max_halvings == 0) return coarse;
  for (int round = 0; round < policy.max_halvings; ++round) {
    dt *= 0.5;
    WaveFunction fine = run_fixed(plan, psi, t0, t1, dt);
    const double gap = distance(fine, coarse);
    log::debug("magnetic dt=" + std::to_string(dt) +
               " richardson gap=" + std::to_string(gap));
    if (gap <= budget) return fine;
    coarse = std::move(fine);
  }
  throw ConvergenceError("magnetic halvings exhausted before meeting the budget");
}

}  // namespace

MagneticModel MagneticModel::make(double q, double b0, double bbar, double r0,
                                  double m) {
  if (!(q != 0.0) || !std::isfinite(q))
    throw ValidationError("magnetic model needs a nonzero finite charge");
  if (!(m > 0.0)) throw ValidationError("magnetic model needs positive mass");
  if (!(r0 > 0.0)) throw ValidationError("magnetic model needs positive r0");
  MagneticModel mm;
  mm.q = q;
  mm.b0 = b0;
  mm.bbar = bbar;
  mm.r0 = r0;
  mm.m = m;
  // The tail identification k = q^2 bbar^2 / (4m) must land in (0, m/4);
  // the oscillator constructor enforces it.
  mm.oscillator =
      OscillatorModel::make(m, q * q * bbar * bbar / (4.0 * m), r0,
                            InnerProfile::constant(q * q * b0 * b0 / (4.0 * m)));
  return mm;
}

double MagneticModel::field(double t) const {
  return std::abs(t) <= r0 ? b0 : bbar / t;
}

double omega_phase(const MagneticModel& mm, double t) {
  const double scale = mm.q / mm.m;
  if (std::abs(t) <= mm.r0) return scale * mm.b0 * t;
  const double inner = scale * mm.b0 * mm.r0;
  const double outer = scale * mm.bbar * std::log(std::abs(t) / mm.r0);
  return t > 0.0 ? inner + outer : -inner + outer;
}

double angular_momentum(const WaveFunction& psi) {
  require_2d(psi.grid, "angular_momentum");
  const Grid& g = psi.grid;
  std::vector<cdouble> coeffs = to_momentum(psi);
  std::vector<cdouble> p0(coeffs.size()), p1(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const int r = static_cast<int>(i) / g.n;
    const int c = static_cast<int>(i) % g.n;
    p0[i] = coeffs[i] * g.momentum_sorted(r);
    p1[i] = coeffs[i] * g.momentum_sorted(c);
  }
  const WaveFunction p0_psi = from_momentum(g, p0, psi.time_tag);
  const WaveFunction p1_psi = from_momentum(g, p1, psi.time_tag);
  cdouble acc(0.0, 0.0);
  for (std::size_t i = 0; i < psi.amp.size(); ++i) {
    const int r = static_cast<int>(i) / g.n;
    const int c = static_cast<int>(i) % g.n;
    const double x0 = g.position(r);
    const double x1 = g.position(c);
    acc += std::conj(psi.amp[i]) * (x0 * p1_psi.amp[i] - x1 * p0_psi.amp[i]);
  }
  return acc.real() * g.cell_volume();
}

WaveFunction rotate_state(const WaveFunction& psi, double angle) {
  require_2d(psi.grid, "rotate_state");
  WaveFunction out = psi;
  if (angle == 0.0) return out;
  const int chunks =
      std::max(1, static_cast<int>(std::ceil(std::abs(angle) / kMaxSubRotation)));
  const double step = angle / chunks;
  const double growth = shear_growth(step);
  for (int i = 0; i < chunks; ++i) {
    if (mass_outside_radius(out, psi.grid.half_width / growth) > kGuardMass)
      throw DomainError("rotate_state: position support too wide for the shears");
    if (momentum_mass_outside_radius(out, psi.grid.nyquist() / growth) > kGuardMass)
      throw DomainError("rotate_state: momentum band too wide for the shears");
    rotate_triple(out.amp, out.grid, step);
  }
  return out;
}

WaveFunction evolve_magnetic(const MagneticModel& mm, const PotentialSpec* V,
                             const WaveFunction& psi, double t0, double t1,
                             const StepPolicy& policy) {
  require_2d(psi.grid, "evolve_magnetic");
  if (!(policy.dt_max > 0.0) || !(policy.error_target > 0.0))
    throw ValidationError("step policy needs positive dt_max and error_target");
  if (t0 == t1) return psi;
  if (mass_outside_radius(psi, 0.95 * psi.grid.half_width) > 1e-9)
    throw DomainError("evolve_magnetic: state too close to the grid edge");

  // Split the range at the field's corners so no step straddles them.
  std::vector<double> knots{t0};
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  for (double corner : {-mm.r0, mm.r0})
    if (lo < corner && corner < hi) knots.push_back(corner);
  if (t0 > t1) std::reverse(knots.begin() + 1, knots.end());
  knots.push_back(t1);

  const BPlan plan = make_bplan(mm, V, psi.grid);
  WaveFunction state = psi;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    state = evolve_segment(plan, state, knots[i], knots[i + 1], policy);
  if (mass_outside_radius(state, 0.95 * state.grid.half_width) > 1e-9)
    throw DomainError("evolve_magnetic: state spread to the grid edge");
  return state;
}

WaveFunction evolve_OS(const MagneticModel& mm, const PotentialSpec* V,
                       const WaveFunction& psi, double t0, double t1,
                       const StepPolicy& policy) {
  require_2d(psi.grid, "evolve_OS");
  return evolve_full(mm.oscillator, V, psi, t0, t1, policy);
}

double reduction_residual(const MagneticModel& mm, const PotentialSpec* V,
                          const WaveFunction& psi, double t,
                          const StepPolicy& policy) {
  require_2d(psi.grid, "reduction_residual");
  if (t < 0.0) throw DomainError("reduction_residual: t must be nonnegative");
  if (t == 0.0) return 0.0;
  const WaveFunction left = evolve_magnetic(mm, V, psi, 0.0, t, policy);
  const WaveFunction right =
      rotate_state(evolve_OS(mm, V, psi, 0.0, t, policy), 0.5 * omega_phase(mm, t));
  return distance(left, right);
}

}  // namespace tdho
