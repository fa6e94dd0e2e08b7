#include "tdho/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace tdho::fft {
namespace {

// Plans are cached per shape/sign/alignment class. fftw_execute_dft may be
// reused on arrays whose fftw_alignment_of matches the planned ones.
using Key = std::tuple<int, int, int, int, int>;  // kind, n, axis/dim, sign, align

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

std::map<Key, fftw_plan>& plan_cache() {
  static std::map<Key, fftw_plan> cache;
  return cache;
}

fftw_plan get_plan(int kind, int n, int extra, int sign, fftw_complex* buf) {
  const int align = fftw_alignment_of(reinterpret_cast<double*>(buf));
  const Key key{kind, n, extra, sign, align};
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = plan_cache().find(key);
  if (it != plan_cache().end()) return it->second;

  fftw_plan plan = nullptr;
  switch (kind) {
    case 0:  // contiguous 1d of length n
      plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
      break;
    case 1:  // full 2d, n x n
      plan = fftw_plan_dft_2d(n, n, buf, buf, sign, FFTW_ESTIMATE);
      break;
    case 2: {  // 2d array, transform along axis `extra`
      const int rank_n[1] = {n};
      if (extra == 1) {
        plan = fftw_plan_many_dft(1, rank_n, n, buf, nullptr, 1, n, buf,
                                  nullptr, 1, n, sign, FFTW_ESTIMATE);
      } else {
        plan = fftw_plan_many_dft(1, rank_n, n, buf, nullptr, n, 1, buf,
                                  nullptr, n, 1, sign, FFTW_ESTIMATE);
      }
      break;
    }
  }
  plan_cache().emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

void transform_1d(std::complex<double>* data, int m, int sign) {
  fftw_complex* buf = as_fftw(data);
  fftw_execute_dft(get_plan(0, m, 0, sign, buf), buf, buf);
}

void transform_all(std::complex<double>* data, int dim, int n, int sign) {
  fftw_complex* buf = as_fftw(data);
  if (dim == 1) {
    fftw_execute_dft(get_plan(0, n, 0, sign, buf), buf, buf);
  } else {
    fftw_execute_dft(get_plan(1, n, 0, sign, buf), buf, buf);
  }
}

void transform_axis(std::complex<double>* data, int n, int axis, int sign) {
  fftw_complex* buf = as_fftw(data);
  fftw_execute_dft(get_plan(2, n, axis, sign, buf), buf, buf);
}

}  // namespace tdho::fft
