#include "kernels_impl.hpp"

#include <algorithm>

namespace pgn::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
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
    const double xi = x[i];
    const double* row = a + i * cols;
    for (std::size_t j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
}

double projected_step(const double* h, std::size_t n, const double* v, const double* hz,
                      double sigma, const double* lower, const double* upper, double* out) {
  double delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double hv = dot(h + i * n, v, n);
    const double t = std::clamp(v[i] - sigma * (hv - hz[i]), lower[i], upper[i]);
    const double d = t - v[i];
    delta += d * d;
    out[i] = t;
  }
  return delta;
}

}  // namespace pgn::kernels::scalar
