#pragma once

#include "tdho/errors.hpp"

namespace tdho {

/// Smooth monotone step built from the bump exp(-1/(u(1-u))): equals 0 for
/// u <= 0, equals 1 for u >= 1, and is infinitely differentiable everywhere.
double smooth_step(double u);

/// Derivative of smooth_step (the normalized bump itself).
double smooth_step_derivative(double u);

/// Rises smoothly from 0 to 1 across [a, b].
double step_up(double s, double a, double b);

/// Falls smoothly from 1 to 0 across [a, b].
double step_down(double s, double a, double b);

/// A smooth scalar cutoff on the real line, one of four shapes:
///  - below:    1 for s <= threshold - width, 0 for s >= threshold
///  - above:    0 for s <= threshold, 1 for s >= threshold + width
///  - bandpass: 0 outside [rise_lo, fall_hi], 1 on [rise_hi, fall_lo]
///  - ramp:     0 for s <= rise_lo, 1 for s >= rise_hi
struct CutoffSpec {
  enum class Kind { below, above, bandpass, ramp };

  Kind kind = Kind::ramp;
  double a = 0.0;  ///< start of the rising (or falling) edge
  double b = 1.0;  ///< end of that edge
  double c = 0.0;  ///< bandpass only: start of the falling edge
  double d = 0.0;  ///< bandpass only: end of the falling edge

  static CutoffSpec below(double threshold, double width);
  static CutoffSpec above(double threshold, double width);
  static CutoffSpec bandpass(double rise_lo, double rise_hi, double fall_lo,
                             double fall_hi);
  static CutoffSpec ramp(double rise_lo, double rise_hi);

  double eval(double s) const;
  double operator()(double s) const { return eval(s); }
};

}  // namespace tdho
