#include "tdho/oscillator.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>

namespace tdho {

namespace {
namespace odeint = boost::numeric::odeint;
using State4 = std::array<double, 4>;
}  // namespace

double lambda_exponent(double m, double k) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("mass must be positive");
  if (!(k > 0.0) || !(k < 0.25 * m))
    throw DomainError("tail coefficient k must lie in (0, m/4)");
  const double q = k / m;
  // small root of l*(l-1) + q = 0, written to avoid cancellation
  return 2.0 * q / (1.0 + std::sqrt(1.0 - 4.0 * q));
}

InnerProfile InnerProfile::constant(double k0) {
  if (!(k0 >= 0.0) || !std::isfinite(k0))
    throw DomainError("constant inner profile needs k0 >= 0");
  InnerProfile p;
  p.kind = Kind::constant;
  p.k0 = k0;
  return p;
}

InnerProfile InnerProfile::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2)
    throw DomainError("tabulated profile needs matching times/values, at least 2");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1])) throw DomainError("tabulated times must ascend");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("tabulated values must be finite");
  InnerProfile p;
  p.kind = Kind::tabulated;
  p.times = std::move(times);
  p.values = std::move(values);
  return p;
}

OscillatorModel OscillatorModel::make(double m, double k, double r0, InnerProfile inner) {
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("r0 must be positive");
  OscillatorModel model;
  model.lambda = lambda_exponent(m, k);
  model.m = m;
  model.k = k;
  model.r0 = r0;
  if (inner.kind == InnerProfile::Kind::tabulated) {
    if (inner.times.front() > -r0 || inner.times.back() < r0)
      throw DomainError("tabulated profile must cover [-r0, r0]");
  }
  model.inner = std::move(inner);
  return model;
}

double OscillatorModel::coefficient(double t) const {
  if (std::abs(t) > r0) return k / (t * t);
  if (inner.kind == InnerProfile::Kind::constant) return inner.k0;
  const auto& ts = inner.times;
  const auto& vs = inner.values;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  if (it == ts.begin()) return vs.front();
  if (it == ts.end()) return vs.back();
  const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
  const std::size_t lo = hi - 1;
  const double u = (t - ts[lo]) / (ts[hi] - ts[lo]);
  return vs[lo] + u * (vs[hi] - vs[lo]);
}

double OscillatorModel::omega0() const {
  if (inner.kind != InnerProfile::Kind::constant)
    throw DomainError("omega0 is defined for the constant inner profile only");
  return std::sqrt(inner.k0 / m);
}

namespace {

PowerTail match_tail(double value, double slope, double r0, double lambda,
                     bool positive_side) {
  const double f1 = std::pow(r0, 1.0 - lambda);
  const double f2 = std::pow(r0, lambda);
  double g1 = (1.0 - lambda) * std::pow(r0, -lambda);
  double g2 = lambda * std::pow(r0, lambda - 1.0);
  if (!positive_side) {
    g1 = -g1;
    g2 = -g2;
  }
  const double det = f1 * g2 - f2 * g1;
  return PowerTail{(value * g2 - slope * f2) / det, (f1 * slope - g1 * value) / det};
}

ValueSlope eval_tail(const PowerTail& tail, double lambda, double t) {
  const double a = std::abs(t);
  const double grow = std::pow(a, 1.0 - lambda);
  const double decay = std::pow(a, lambda);
  const double value = tail.growth * grow + tail.decay * decay;
  double slope = tail.growth * (1.0 - lambda) * grow / a + tail.decay * lambda * decay / a;
  if (t < 0.0) slope = -slope;
  return ValueSlope{value, slope};
}

std::vector<std::array<double, 4>> integrate_inner(const OscillatorModel& model,
                                                   bool positive_side, int cells) {
  const double sign = positive_side ? 1.0 : -1.0;
  auto rhs = [&](const State4& y, State4& dy, double s) {
    const double w = model.coefficient(sign * s) / model.m;
    dy[0] = y[1];
    dy[1] = -w * y[0];
    dy[2] = y[3];
    dy[3] = -w * y[2];
  };
  // integrate in s = |t|; the stored samples hold physical (value, slope)
  State4 y{1.0, 0.0, 0.0, sign * 1.0};
  std::vector<std::array<double, 4>> samples;
  samples.reserve(cells + 1);
  auto observe = [&](const State4& state, double) {
    samples.push_back({state[0], sign * state[1], state[2], sign * state[3]});
  };
  const double h = model.r0 / cells;
  auto stepper = odeint::make_controlled(1e-13, 1e-13,
                                         odeint::runge_kutta_fehlberg78<State4>());
  odeint::integrate_const(stepper, rhs, y, 0.0, model.r0, h, observe);
  if (samples.size() != static_cast<std::size_t>(cells + 1))
    throw IntegrationError("inner profile integration produced a short table");
  return samples;
}

}  // namespace

TailCoefficients matching_coefficients(const OscillatorModel& model) {
  if (model.inner.kind != InnerProfile::Kind::constant)
    throw DomainError("closed-form matching needs the constant inner profile");
  const double lambda = model.lambda;
  const double r0 = model.r0;
  const double w0 = model.omega0();
  const double cs = std::cos(w0 * r0);
  const double sn = std::sin(w0 * r0);
  const double sn_over_w0 = w0 == 0.0 ? r0 : sn / w0;
  const double one_minus = 1.0 - 2.0 * lambda;
  TailCoefficients c;
  c.c1 = (-lambda * cs - r0 * w0 * sn) / (std::pow(r0, 1.0 - lambda) * one_minus);
  c.c2 = ((1.0 - lambda) * cs + r0 * w0 * sn) / (std::pow(r0, lambda) * one_minus);
  c.c3 = (r0 * cs - lambda * sn_over_w0) / (std::pow(r0, 1.0 - lambda) * one_minus);
  c.c4 = (-r0 * cs + (1.0 - lambda) * sn_over_w0) / (std::pow(r0, lambda) * one_minus);
  return c;
}

FundamentalSolution solve_fundamental(const OscillatorModel& model) {
  FundamentalSolution fs;
  fs.model_ = model;
  if (model.inner.kind == InnerProfile::Kind::constant) {
    const TailCoefficients c = matching_coefficients(model);
    fs.pos_[0] = PowerTail{c.c1, c.c2};
    fs.pos_[1] = PowerTail{c.c3, c.c4};
    fs.neg_[0] = PowerTail{c.c1, c.c2};
    fs.neg_[1] = PowerTail{-c.c3, -c.c4};
    return fs;
  }
  const int cells = 2048;
  fs.sample_step_ = model.r0 / cells;
  fs.samples_pos_ = integrate_inner(model, true, cells);
  fs.samples_neg_ = integrate_inner(model, false, cells);
  const auto& endp = fs.samples_pos_.back();
  const auto& endn = fs.samples_neg_.back();
  fs.pos_[0] = match_tail(endp[0], endp[1], model.r0, model.lambda, true);
  fs.pos_[1] = match_tail(endp[2], endp[3], model.r0, model.lambda, true);
  fs.neg_[0] = match_tail(endn[0], endn[1], model.r0, model.lambda, false);
  fs.neg_[1] = match_tail(endn[2], endn[3], model.r0, model.lambda, false);
  return fs;
}

ValueSlope FundamentalSolution::eval_inner(int which, double t) const {
  if (model_.inner.kind == InnerProfile::Kind::constant) {
    const double w0 = model_.omega0();
    if (which == 0) {
      if (w0 == 0.0) return ValueSlope{1.0, 0.0};
      return ValueSlope{std::cos(w0 * t), -w0 * std::sin(w0 * t)};
    }
    if (w0 == 0.0) return ValueSlope{t, 1.0};
    return ValueSlope{std::sin(w0 * t) / w0, std::cos(w0 * t)};
  }

  const auto& table = t >= 0.0 ? samples_pos_ : samples_neg_;
  const double sign = t >= 0.0 ? 1.0 : -1.0;
  const double s = std::abs(t);
  const double h = sample_step_;
  std::size_t cell = std::min(static_cast<std::size_t>(s / h), table.size() - 2);
  const double u = (s - cell * h) / h;
  const int v_idx = which == 0 ? 0 : 2;
  const double v0 = table[cell][v_idx];
  const double v1 = table[cell + 1][v_idx];
  // slopes with respect to s = |t|
  const double m0 = sign * table[cell][v_idx + 1];
  const double m1 = sign * table[cell + 1][v_idx + 1];
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double value = (2 * u3 - 3 * u2 + 1) * v0 + (u3 - 2 * u2 + u) * h * m0 +
                       (-2 * u3 + 3 * u2) * v1 + (u3 - u2) * h * m1;
  const double dvds = ((6 * u2 - 6 * u) * v0 + (3 * u2 - 4 * u + 1) * h * m0 +
                       (-6 * u2 + 6 * u) * v1 + (3 * u2 - 2 * u) * h * m1) /
                      h;
  return ValueSlope{value, sign * dvds};
}

ValueSlope FundamentalSolution::eval(int which, double t) const {
  if (std::abs(t) <= model_.r0) return eval_inner(which, t);
  const PowerTail& tail = t > 0.0 ? pos_[which] : neg_[which];
  return eval_tail(tail, model_.lambda, t);
}

ValueSlope FundamentalSolution::cosine_like(double t) const { return eval(0, t); }
ValueSlope FundamentalSolution::sine_like(double t) const { return eval(1, t); }

double FundamentalSolution::wronskian(double t) const {
  const ValueSlope a = cosine_like(t);
  const ValueSlope b = sine_like(t);
  return a.value * b.slope - a.slope * b.value;
}

TailCoefficients FundamentalSolution::tail(bool positive_side) const {
  const PowerTail* side = positive_side ? pos_ : neg_;
  return TailCoefficients{side[0].growth, side[0].decay, side[1].growth, side[1].decay};
}

ClassicalState classical_flow(const FundamentalSolution& fs, const ClassicalState& init,
                              double t) {
  const ValueSlope a = fs.cosine_like(t);
  const ValueSlope b = fs.sine_like(t);
  const double m = fs.model().m;
  return ClassicalState{a.value * init.x + b.value * init.p / m,
                        m * a.slope * init.x + b.slope * init.p};
}

AsymptoticCoefficients asymptotic_coefficients(const FundamentalSolution& fs, double tol) {
  const OscillatorModel& model = fs.model();
  const double lambda = model.lambda;
  const double f = std::pow(2.0, -(1.0 - 2.0 * lambda));
  auto scaled = [&](int which, double t) {
    const ValueSlope v = which == 0 ? fs.cosine_like(t) : fs.sine_like(t);
    return v.value / std::pow(t, 1.0 - lambda);
  };
  auto richardson = [&](int which, double t) {
    return (scaled(which, 2.0 * t) - f * scaled(which, t)) / (1.0 - f);
  };
  const double t1 = 32.0 * model.r0;
  AsymptoticCoefficients out;
  const double r1a = richardson(0, t1);
  const double r1b = richardson(0, 2.0 * t1);
  const double r2a = richardson(1, t1);
  const double r2b = richardson(1, 2.0 * t1);
  out.ctilde1 = r1b;
  out.ctilde2 = r2b;
  out.err1 = std::abs(r1b - r1a);
  out.err2 = std::abs(r2b - r2a);
  if (out.err1 > tol || out.err2 > tol)
    throw ConvergenceError("asymptotic coefficient extrapolation did not settle");
  return out;
}

}  // namespace tdho
