#pragma once

#include <array>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

/// Exponent governing the power-law regime: the small root of
/// l*(l-1) + k/m = 0, in (0, 1/2) for 0 < k < m/4.
double lambda_exponent(double m, double k);

/// Coefficient profile inside the matching window |t| <= r0.
struct InnerProfile {
  enum class Kind { constant, tabulated };
  Kind kind = Kind::constant;
  double k0 = 0.0;              // constant profile, k0 >= 0
  std::vector<double> times;    // tabulated profile, ascending, covering [-r0, r0]
  std::vector<double> values;

  static InnerProfile constant(double k0);
  static InnerProfile tabulated(std::vector<double> times, std::vector<double> values);
};

/// Harmonic coefficient k(t): the inner profile for |t| <= r0 and the
/// inverse-square decay k/t^2 beyond.
struct OscillatorModel {
  double m = 1.0;
  double k = 0.1875;
  double r0 = 1.0;
  InnerProfile inner;
  double lambda = 0.25;  // derived from (m, k)

  static OscillatorModel make(double m, double k, double r0, InnerProfile inner);

  double coefficient(double t) const;
  /// sqrt(k0/m); only meaningful for the constant inner profile.
  double omega0() const;
};

struct ValueSlope {
  double value = 0.0;
  double slope = 0.0;
};

/// Per-solution tail coefficients: value = growth*|t|^(1-lambda) + decay*|t|^lambda.
struct PowerTail {
  double growth = 0.0;
  double decay = 0.0;
};

/// Tail coefficients on one side for both solutions. c1, c2 belong to the
/// cosine-like solution and c3, c4 to the sine-like one (coefficients of
/// |t|^(1-lambda) and |t|^lambda respectively; on the negative side the
/// sine-like pair absorbs the odd sign).
struct TailCoefficients {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

/// The two normalized solutions of zeta'' + (k(t)/m) zeta = 0 with
/// cosine-like (1, 0) and sine-like (0, 1) data at t = 0. Inside the
/// matching window they follow the inner profile (closed form for the
/// constant profile, adaptive integration otherwise); outside they are
/// always evaluated from the matched power-law tails.
class FundamentalSolution {
 public:
  ValueSlope cosine_like(double t) const;
  ValueSlope sine_like(double t) const;
  double wronskian(double t) const;
  TailCoefficients tail(bool positive_side) const;
  const OscillatorModel& model() const { return model_; }

 private:
  friend FundamentalSolution solve_fundamental(const OscillatorModel&);

  OscillatorModel model_;
  PowerTail pos_[2], neg_[2];
  // dense samples of (cos.value, cos.slope, sin.value, sin.slope) for the
  // tabulated profile, uniform in |t| on [0, r0], one table per side
  std::vector<std::array<double, 4>> samples_pos_, samples_neg_;
  double sample_step_ = 0.0;

  ValueSlope eval(int which, double t) const;
  ValueSlope eval_inner(int which, double t) const;
};

FundamentalSolution solve_fundamental(const OscillatorModel& model);

/// Closed-form tail coefficients for the constant inner profile
/// (positive side); the k0 = 0 limit is handled analytically.
TailCoefficients matching_coefficients(const OscillatorModel& model);

struct ClassicalState {
  double x = 0.0;
  double p = 0.0;
};

/// Phase-space transport by the fundamental-solution matrix (unit determinant).
ClassicalState classical_flow(const FundamentalSolution& fs, const ClassicalState& init,
                              double t);

struct AsymptoticCoefficients {
  double ctilde1 = 0.0;
  double ctilde2 = 0.0;
  double err1 = 0.0;
  double err2 = 0.0;
};

/// Large-time limits of zeta_j(t) / t^(1-lambda) with a Richardson error
/// estimate from doubling the evaluation time.
AsymptoticCoefficients asymptotic_coefficients(const FundamentalSolution& fs,
                                               double tol = 1e-9);

}  // namespace tdho
