#pragma once

#include <complex>

namespace tdho::fft {

constexpr int forward = -1;
constexpr int backward = +1;

/// In-place unnormalized complex DFT over all axes of a row-major array
/// with `dim` axes of `n` points each (dim is 1 or 2).
void transform_all(std::complex<double>* data, int dim, int n, int sign);

/// In-place unnormalized complex DFT along one axis of an n-by-n row-major
/// array. axis 0 is the slow (row) index, axis 1 the contiguous one.
void transform_axis(std::complex<double>* data, int n, int axis, int sign);

/// In-place unnormalized complex DFT of a contiguous length-m buffer.
void transform_1d(std::complex<double>* data, int m, int sign);

}  // namespace tdho::fft
