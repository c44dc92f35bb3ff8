#pragma once

// Brute-force reference computations that share no code path with the
// library kernels. Used by `pgn validate` and the test suites; intended for
// small dimensions only.

#include <functional>
#include <span>

#include "pgn/matrix.hpp"
#include "pgn/prox.hpp"

namespace pgn::oracles {

// Solves M x = b by Gaussian elimination with partial pivoting (M square).
Vector gauss_solve(const Matrix& m, std::span<const double> b);

// (A^T A)^{-1} A^T formed column by column with gauss_solve.
Matrix normal_equation_pinv(const Matrix& a);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
Vector symmetric_eigenvalues(const Matrix& s);

// Singular values as square roots of the Gram matrix eigenvalues, descending.
Vector gram_singular_values(const Matrix& a);

// sqrt of the dominant eigenvalue of A^T A by power iteration.
double power_iteration_norm(const Matrix& a, int iterations = 2000);

// argmin_{v in box} 1/2 ||A v - y||^2 by enumerating every assignment of each
// coordinate to {free, lower, upper} and solving the reduced normal equations.
Vector box_least_squares(const Matrix& a, std::span<const double> y, const prox::Box& box);

// Identity-metric prox of (indicator of box) o A^dagger on R^m:
// y -> A v*(y) + (I - A A^dagger) y with v* from box_least_squares.
std::function<Vector(std::span<const double>)> composed_box_prox(const Matrix& a,
                                                                 const Matrix& pinv,
                                                                 const prox::Box& box);

// Minimizer of a unimodal f on [a, b]: grid scan with `grid` cells, then
// golden-section refinement of the best bracket down to `tol`.
double grid_golden_minimize(const std::function<double(double)>& f, double a, double b,
                            int grid = 2000, double tol = 1e-13);

// Same composed prox for a rectangular diagonal A (diagonal d, any m >= n),
// computed coordinate by coordinate with grid_golden_minimize; coordinates
// beyond d.size() pass through. Infinite bounds are clipped to +-1e3 around
// the target.
std::function<Vector(std::span<const double>)> composed_box_prox_diagonal(
    std::span<const double> d, const prox::Box& box);

}  // namespace pgn::oracles
