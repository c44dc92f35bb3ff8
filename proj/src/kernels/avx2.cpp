// AVX2 + FMA variants. This translation unit is the only one built with
// -mavx2 -mfma; callers reach it through the dispatch table after a CPUID check.

#include <immintrin.h>

#include <algorithm>

#include "kernels_impl.hpp"

namespace pgn::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot(a + i * cols, x, cols);
}

void gemv_transposed(const double* a, std::size_t rows, std::size_t cols, const double* x,
                     double* y) {
  std::fill(y, y + cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    const __m256d xi = _mm256_set1_pd(x[i]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(y + j,
                       _mm256_fmadd_pd(_mm256_loadu_pd(row + j), xi, _mm256_loadu_pd(y + j)));
    }
    for (; j < cols; ++j) y[j] += row[j] * x[i];
  }
}

// H is symmetric, so (H v)[i..i+4) = sum_j v[j] * H[j][i..i+4) streams rows
// contiguously instead of gathering columns.
double projected_step(const double* h, std::size_t n, const double* v, const double* hz,
                      double sigma, const double* lower, const double* upper, double* out) {
  const __m256d vsigma = _mm256_set1_pd(sigma);
  __m256d vdelta = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d hv = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n; ++j) {
      hv = _mm256_fmadd_pd(_mm256_loadu_pd(h + j * n + i), _mm256_set1_pd(v[j]), hv);
    }
    const __m256d vi = _mm256_loadu_pd(v + i);
    const __m256d grad = _mm256_sub_pd(hv, _mm256_loadu_pd(hz + i));
    __m256d t = _mm256_fnmadd_pd(vsigma, grad, vi);
    t = _mm256_max_pd(t, _mm256_loadu_pd(lower + i));
    t = _mm256_min_pd(t, _mm256_loadu_pd(upper + i));
    const __m256d d = _mm256_sub_pd(t, vi);
    vdelta = _mm256_fmadd_pd(d, d, vdelta);
    _mm256_storeu_pd(out + i, t);
  }
  double delta = hsum(vdelta);
  for (; i < n; ++i) {
    const double hv = dot(h + i * n, v, n);
    const double t = std::clamp(v[i] - sigma * (hv - hz[i]), lower[i], upper[i]);
    const double d = t - v[i];
    delta += d * d;
    out[i] = t;
  }
  return delta;
}

}  // namespace pgn::kernels::avx2
