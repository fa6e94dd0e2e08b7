#include "tdho/spectral.hpp"

#include "tdho/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tdho {

namespace {

constexpr double kGuardMass = 1e-14;

std::array<double, 2> point_at(const Grid& g, std::size_t idx, bool momentum) {
  std::array<double, 2> x{0.0, 0.0};
  if (g.dim == 1) {
    x[0] = momentum ? g.momentum_sorted(static_cast<int>(idx))
                    : g.position(static_cast<int>(idx));
  } else {
    const int row = static_cast<int>(idx) / g.n;
    const int col = static_cast<int>(idx) % g.n;
    x[0] = momentum ? g.momentum_sorted(row) : g.position(row);
    x[1] = momentum ? g.momentum_sorted(col) : g.position(col);
  }
  return x;
}

}  // namespace

WaveFunction apply_position_multiplier(const WaveFunction& psi, const PointFn& g) {
  WaveFunction out = psi;
  for (std::size_t i = 0; i < out.amp.size(); ++i)
    out.amp[i] *= g(point_at(psi.grid, i, false));
  return out;
}

WaveFunction apply_fourier_multiplier(const WaveFunction& psi, const PointFn& f) {
  std::vector<cdouble> coeffs = to_momentum(psi);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= f(point_at(psi.grid, i, true));
  return from_momentum(psi.grid, coeffs, psi.time_tag);
}

WaveFunction quadratic_position_phase(const WaveFunction& psi, double coeff) {
  WaveFunction out = psi;
  const Grid& g = psi.grid;
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) {
      const double x = g.position(i);
      out.amp[i] *= std::polar(1.0, coeff * x * x);
    }
    return out;
  }
  for (int r = 0; r < g.n; ++r) {
    const double y = g.position(r);
    for (int c = 0; c < g.n; ++c) {
      const double x = g.position(c);
      out.amp[static_cast<std::size_t>(r) * g.n + c] *=
          std::polar(1.0, coeff * (x * x + y * y));
    }
  }
  return out;
}

WaveFunction quadratic_momentum_phase(const WaveFunction& psi, double coeff) {
  std::vector<cdouble> coeffs = to_momentum(psi);
  const Grid& g = psi.grid;
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) {
      const double p = g.momentum_sorted(i);
      coeffs[i] *= std::polar(1.0, coeff * p * p);
    }
  } else {
    for (int r = 0; r < g.n; ++r) {
      const double q = g.momentum_sorted(r);
      for (int c = 0; c < g.n; ++c) {
        const double p = g.momentum_sorted(c);
        coeffs[static_cast<std::size_t>(r) * g.n + c] *=
            std::polar(1.0, coeff * (p * p + q * q));
      }
    }
  }
  return from_momentum(g, coeffs, psi.time_tag);
}

WaveFunction make_gaussian(const Grid& grid, const std::array<double, 2>& center,
                           const std::array<double, 2>& momentum, double width) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw DomainError("gaussian width must be positive");
  for (int axis = 0; axis < grid.dim; ++axis) {
    if (std::abs(center[axis]) + 6.0 * width > grid.half_width)
      throw DomainError("gaussian center closer than 6 widths to a boundary");
    if (std::abs(momentum[axis]) + 6.0 / width > grid.nyquist())
      throw DomainError("gaussian momentum closer than 6/width to the band edge");
  }
  WaveFunction psi = WaveFunction::zero(grid);
  const double inv2s2 = 1.0 / (2.0 * width * width);
  for (std::size_t i = 0; i < psi.amp.size(); ++i) {
    const std::array<double, 2> x = point_at(grid, i, false);
    double r2 = 0.0;
    double phase = 0.0;
    for (int axis = 0; axis < grid.dim; ++axis) {
      const double d = x[axis] - center[axis];
      r2 += d * d;
      phase += momentum[axis] * x[axis];
    }
    psi.amp[i] = std::polar(std::exp(-r2 * inv2s2), phase);
  }
  const double scale = 1.0 / norm(psi);
  for (cdouble& a : psi.amp) a *= scale;
  return psi;
}

namespace {

// Evaluates the zero-padded trigonometric interpolant of one axis at the
// uniformly scaled points a*x_i via a Bluestein chirp transform.  The padded
// box [-2L, 2L) keeps periodic images out of the way for scale factors
// a < 3 (and beyond, subject to the caller's support guard).
class ChirpResampler {
 public:
  ChirpResampler(int n, double a) : n_(n), m_(2 * n) {
    conv_ = 1;
    while (conv_ < m_ + n_ - 1) conv_ *= 2;
    const long double pi = std::numbers::pi_v<long double>;
    const long double theta = 2.0L * pi * static_cast<long double>(a) / m_;

    pre_.resize(m_);
    chirp_.resize(m_);
    for (int l = 0; l < m_; ++l) {
      const long double kp = l - m_ / 2;
      const long double ang1 = pi * kp * (2.0L - static_cast<long double>(a)) / 2.0L;
      pre_[l] = std::polar(1.0, static_cast<double>(std::fmod(ang1, 2.0L * pi)));
      const long double ang2 =
          0.5L * theta * static_cast<long double>(l) * static_cast<long double>(l);
      chirp_[l] = std::polar(1.0, static_cast<double>(std::fmod(ang2, 2.0L * pi)));
    }

    kernel_fft_.assign(conv_, cdouble(0.0, 0.0));
    for (int j = -(m_ - 1); j <= n_ - 1; ++j) {
      const long double ang =
          0.5L * theta * static_cast<long double>(j) * static_cast<long double>(j);
      kernel_fft_[(j + conv_) % conv_] =
          std::polar(1.0, -static_cast<double>(std::fmod(ang, 2.0L * pi)));
    }
    fft::transform_1d(kernel_fft_.data(), conv_, fft::forward);

    out_phase_.resize(n_);
    const double inv = 1.0 / (static_cast<double>(m_) * conv_);
    for (int i = 0; i < n_; ++i) {
      const long double ang =
          0.5L * theta * static_cast<long double>(i) * static_cast<long double>(i) -
          pi * static_cast<long double>(a) * i;
      out_phase_[i] =
          inv * std::polar(1.0, static_cast<double>(std::fmod(ang, 2.0L * pi)));
    }

    padded_.resize(m_);
    work_.resize(conv_);
  }

  void run(const cdouble* in, std::ptrdiff_t in_stride, cdouble* out,
           std::ptrdiff_t out_stride) {
    // zero-pad into the big box: original sample i sits at padded index i + n/2
    std::fill(padded_.begin(), padded_.end(), cdouble(0.0, 0.0));
    for (int i = 0; i < n_; ++i) padded_[i + n_ / 2] = in[i * in_stride];
    fft::transform_1d(padded_.data(), m_, fft::forward);

    std::fill(work_.begin(), work_.end(), cdouble(0.0, 0.0));
    for (int l = 0; l < m_; ++l) {
      const int raw = (l + m_ / 2) % m_;  // sorted index l <-> FFT bin
      work_[l] = padded_[raw] * pre_[l] * chirp_[l];
    }
    fft::transform_1d(work_.data(), conv_, fft::forward);
    for (int j = 0; j < conv_; ++j) work_[j] *= kernel_fft_[j];
    fft::transform_1d(work_.data(), conv_, fft::backward);

    for (int i = 0; i < n_; ++i) out[i * out_stride] = work_[i] * out_phase_[i];
  }

 private:
  int n_;
  int m_;
  int conv_;
  std::vector<cdouble> pre_;
  std::vector<cdouble> chirp_;
  std::vector<cdouble> kernel_fft_;
  std::vector<cdouble> out_phase_;
  std::vector<cdouble> padded_;
  std::vector<cdouble> work_;
};

}  // namespace

WaveFunction dilate(const WaveFunction& psi, double beta) {
  if (beta == 0.0) return psi;
  if (!std::isfinite(beta)) throw DomainError("dilation parameter must be finite");
  const double a = std::exp(2.0 * beta);
  if (a < 1.0 / 64.0 || a > 64.0)
    throw DomainError("dilation scale factor outside [1/64, 64]");

  const Grid& g = psi.grid;
  const double total = norm2(psi);
  if (total > 0.0) {
    if (a < 1.0) {
      // output support expands by 1/a; the state must fit the shrunk window
      if (mass_outside_box(psi, a * g.half_width) > kGuardMass)
        throw DomainError("dilation would push position support off the grid");
    } else {
      // momentum band expands by a; and periodic images of the padded box
      // must stay clear of the support
      if (1.0 - low_momentum_mass(psi, g.nyquist() / a) > kGuardMass)
        throw DomainError("dilation would push the momentum band past Nyquist");
      const double wrap_radius = (4.0 - a) * g.half_width;
      if (wrap_radius < g.half_width) {
        if (wrap_radius <= 0.0 || mass_outside_box(psi, wrap_radius) > kGuardMass)
          throw DomainError("dilation scale too large for the padded window");
      }
    }
  }

  WaveFunction out = psi;
  ChirpResampler resampler(g.n, a);
  if (g.dim == 1) {
    resampler.run(psi.amp.data(), 1, out.amp.data(), 1);
  } else {
    // rows first (contiguous), then columns
    for (int r = 0; r < g.n; ++r)
      resampler.run(psi.amp.data() + static_cast<std::size_t>(r) * g.n, 1,
                    out.amp.data() + static_cast<std::size_t>(r) * g.n, 1);
    std::vector<cdouble> col(g.n);
    for (int c = 0; c < g.n; ++c) {
      for (int r = 0; r < g.n; ++r) col[r] = out.amp[static_cast<std::size_t>(r) * g.n + c];
      resampler.run(col.data(), 1, out.amp.data() + c, g.n);
    }
  }
  const double amp_factor = std::exp(g.dim * beta);
  for (cdouble& v : out.amp) v *= amp_factor;
  return out;
}

namespace {

WaveFunction coordinate_multiply(const WaveFunction& psi, int axis) {
  WaveFunction out = psi;
  const Grid& g = psi.grid;
  for (std::size_t i = 0; i < out.amp.size(); ++i)
    out.amp[i] *= point_at(g, i, false)[axis];
  return out;
}

WaveFunction momentum_axis_multiply(const WaveFunction& psi, int axis) {
  std::vector<cdouble> coeffs = to_momentum(psi);
  const Grid& g = psi.grid;
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= point_at(g, i, true)[axis];
  return from_momentum(g, coeffs, psi.time_tag);
}

WaveFunction direction_multiply(const WaveFunction& psi, int axis, double guard) {
  WaveFunction out = psi;
  const Grid& g = psi.grid;
  for (std::size_t i = 0; i < out.amp.size(); ++i) {
    const std::array<double, 2> x = point_at(g, i, false);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    out.amp[i] *= x[axis] / std::max(r, guard);
  }
  return out;
}

}  // namespace

WaveFunction theta_apply(const WaveFunction& psi, const OscillatorModel& model,
                         double t, double origin_guard) {
  if (!(t > 0.0)) throw DomainError("defect operator needs t > 0");
  const double guard = origin_guard > 0.0 ? origin_guard : psi.grid.dx();
  const double power = 1.0 - 2.0 * model.lambda;
  const double drift = model.m * power / std::pow(t, power);

  WaveFunction out = WaveFunction::zero(psi.grid);
  out.time_tag = psi.time_tag;
  for (int axis = 0; axis < psi.grid.dim; ++axis) {
    WaveFunction omega_psi = direction_multiply(psi, axis, guard);
    // defect along this axis: p_axis - drift * x_axis, applied to both orders
    WaveFunction d_psi =
        momentum_axis_multiply(psi, axis) - cdouble(drift) * coordinate_multiply(psi, axis);
    WaveFunction d_omega = momentum_axis_multiply(omega_psi, axis) -
                           cdouble(drift) * coordinate_multiply(omega_psi, axis);
    out = out + cdouble(0.5) * (direction_multiply(d_psi, axis, guard) + d_omega);
  }
  return out;
}

}  // namespace tdho
