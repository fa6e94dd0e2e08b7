#include "tdho/cutoffs.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace tdho {

namespace {

double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u)));
}

struct StepTable {
  static constexpr int cells = 4096;
  std::array<double, cells + 1> cum{};
  double total = 0.0;

  StepTable() {
    // Cumulative integral of the bump on a 4x finer grid.  All derivatives of
    // the bump vanish at 0 and 1, so the trapezoid sum converges faster than
    // any power of the spacing.
    constexpr int fine = 4 * cells;
    std::vector<double> acc(fine + 1, 0.0);
    const double h = 1.0 / fine;
    for (int i = 1; i <= fine; ++i) {
      const double left = bump((i - 1) * h);
      const double right = bump(i * h);
      acc[i] = acc[i - 1] + 0.5 * h * (left + right);
    }
    total = acc[fine];
    for (int i = 0; i <= cells; ++i) cum[i] = acc[4 * i] / total;
  }
};

const StepTable& table() {
  static const StepTable t;
  return t;
}

}  // namespace

double smooth_step_derivative(double u) { return bump(u) / table().total; }

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const StepTable& t = table();
  const double s = u * StepTable::cells;
  int cell = static_cast<int>(s);
  if (cell >= StepTable::cells) cell = StepTable::cells - 1;
  const double h = 1.0 / StepTable::cells;
  const double x = s - cell;
  const double v0 = t.cum[cell];
  const double v1 = t.cum[cell + 1];
  const double m0 = h * smooth_step_derivative(cell * h);
  const double m1 = h * smooth_step_derivative((cell + 1) * h);
  const double x2 = x * x;
  const double x3 = x2 * x;
  double value = (2 * x3 - 3 * x2 + 1) * v0 + (x3 - 2 * x2 + x) * m0 +
                 (-2 * x3 + 3 * x2) * v1 + (x3 - x2) * m1;
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return value;
}

double step_up(double s, double a, double b) { return smooth_step((s - a) / (b - a)); }

double step_down(double s, double a, double b) { return smooth_step((b - s) / (b - a)); }

CutoffSpec CutoffSpec::below(double threshold, double width) {
  if (!(width > 0.0)) throw DomainError("cutoff width must be positive");
  CutoffSpec spec;
  spec.kind = Kind::below;
  spec.a = threshold - width;
  spec.b = threshold;
  return spec;
}

CutoffSpec CutoffSpec::above(double threshold, double width) {
  if (!(width > 0.0)) throw DomainError("cutoff width must be positive");
  CutoffSpec spec;
  spec.kind = Kind::above;
  spec.a = threshold;
  spec.b = threshold + width;
  return spec;
}

CutoffSpec CutoffSpec::bandpass(double rise_lo, double rise_hi, double fall_lo,
                                double fall_hi) {
  if (!(rise_lo < rise_hi && rise_hi <= fall_lo && fall_lo < fall_hi))
    throw DomainError("bandpass breakpoints must satisfy lo < hi <= lo' < hi'");
  CutoffSpec spec;
  spec.kind = Kind::bandpass;
  spec.a = rise_lo;
  spec.b = rise_hi;
  spec.c = fall_lo;
  spec.d = fall_hi;
  return spec;
}

CutoffSpec CutoffSpec::ramp(double rise_lo, double rise_hi) {
  if (!(rise_lo < rise_hi)) throw DomainError("ramp needs rise_lo < rise_hi");
  CutoffSpec spec;
  spec.kind = Kind::ramp;
  spec.a = rise_lo;
  spec.b = rise_hi;
  return spec;
}

double CutoffSpec::eval(double s) const {
  switch (kind) {
    case Kind::below:
      return step_down(s, a, b);
    case Kind::above:
      return step_up(s, a, b);
    case Kind::bandpass:
      return step_up(s, a, b) * step_down(s, c, d);
    case Kind::ramp:
      return step_up(s, a, b);
  }
  return 0.0;
}

}  // namespace tdho
