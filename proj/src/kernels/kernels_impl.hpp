#pragma once

#include <cstddef>

namespace pgn::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_transposed(const double* a, std::size_t rows, std::size_t cols, const double* x,
                     double* y);
double projected_step(const double* h, std::size_t n, const double* v, const double* hz,
                      double sigma, const double* lower, const double* upper, double* out);
}  // namespace scalar

#if defined(PGN_HAVE_AVX2_KERNELS)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void gemv(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_transposed(const double* a, std::size_t rows, std::size_t cols, const double* x,
                     double* y);
double projected_step(const double* h, std::size_t n, const double* v, const double* hz,
                      double sigma, const double* lower, const double* upper, double* out);
}  // namespace avx2
#endif

}  // namespace pgn::kernels
