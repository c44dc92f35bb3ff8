#pragma once

// Dense kernels for injective (full column rank) matrices: thin SVD by
// one-sided Jacobi rotations, the Moore-Penrose pseudoinverse, spectral norms,
// condition numbers and Householder least squares.

#include <span>

#include "pgn/matrix.hpp"

namespace pgn::linalg {

// Singular values are compared against rank_tolerance * ||A||.
inline constexpr double kDefaultRankTolerance = 1e-10;

// A = U diag(s) V^T with U m x n, V n x n, s sorted descending. Requires m >= n.
struct Svd {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

Svd thin_svd(const Matrix& a);

// All min(m, n) singular values, descending, for any shape.
Vector singular_values(const Matrix& a);

struct PinvResult {
  Matrix pinv;  // n x m
  double smallest_singular_value_estimate = 0.0;
  bool injective = false;
};

// A^dagger = V diag(1/s) U^T for m >= n. Throws RankDeficient when
// sigma_min <= rank_tolerance * sigma_max, ShapeMismatch when m < n.
PinvResult pseudoinverse(const Matrix& a, double rank_tolerance = kDefaultRankTolerance);

// Spectral norms of A P A - A, P A P - P, (A P)^T - A P, (P A)^T - P A.
struct PenroseResiduals {
  double apa_minus_a = 0.0;
  double pap_minus_p = 0.0;
  double ap_asymmetry = 0.0;
  double pa_asymmetry = 0.0;

  double max() const;
};

PenroseResiduals penrose_residuals(const Matrix& a, const Matrix& p);

// True iff every Penrose residual is <= tol * max(1, ||A||).
bool verify_penrose(const Matrix& a, const Matrix& p, double tol);

// Largest singular value.
double operator_norm(const Matrix& a);

// beta = ||A^dagger|| = 1 / sigma_min, kappa = sigma_max / sigma_min.
struct ConditionData {
  double beta = 0.0;
  double kappa = 0.0;
};

ConditionData condition_data(const Matrix& a, double rank_tolerance = kDefaultRankTolerance);

// argmin_x ||A x - b|| by Householder QR. Throws RankDeficient if a pivot of R
// vanishes relative to ||A||_F.
Vector solve_least_squares(const Matrix& a, std::span<const double> b,
                           double rank_tolerance = kDefaultRankTolerance);

}  // namespace pgn::linalg
