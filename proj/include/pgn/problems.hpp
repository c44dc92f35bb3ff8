#pragma once

// Built-in box-constrained benchmark problems and helpers for validating
// analytic Jacobians.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgn/prox.hpp"
#include "pgn/solver.hpp"

namespace pgn::problems {

enum class CaseSource { kBuiltIn, kExternalNle };

// One row of the benchmark table: dimensions, box, reference minimizer
// (5 digits) and reference average outer-iteration count.
struct CaseInfo {
  std::string name;
  std::size_t n = 0;
  std::size_t m = 0;
  prox::Box box;
  std::optional<Vector> reference_x;
  std::optional<int> reference_avg_iterations;
  CaseSource source = CaseSource::kBuiltIn;
  // Fixed initializations for the external cases; empty means random starts.
  std::vector<Vector> fixed_starts;
};

struct BenchmarkCase {
  solver::Problem problem;
  CaseInfo info;
};

// rosenbrock, kowalik, osborne1, osborne2, twoeq6, teneq1b.
const std::vector<std::string>& case_names();

// Table metadata; available for every case. Throws UnknownProblem.
CaseInfo case_info(std::string_view name);

// Throws UnknownProblem, or ExternalDefinitionUnavailable for the external
// cases whose equations are not bundled.
BenchmarkCase get_case(std::string_view name);

// Residual models with caller-supplied observations; the built-in cases use
// the embedded tables. Throws InvalidArgument on a wrong observation count.
solver::Problem rosenbrock();
solver::Problem kowalik(std::span<const double> y);
solver::Problem osborne1(std::span<const double> y);
solver::Problem osborne2(std::span<const double> y);

std::span<const double> kowalik_observations();
// Observations used by the osborne1 case (the first osborne1_points()).
std::span<const double> osborne1_observations();
std::span<const double> osborne2_observations();

// Central differences, column i = (F(x + h e_i) - F(x - h e_i)) / (2h).
// Throws InvalidPoint if any evaluation point is outside the domain.
Matrix finite_diff_jacobian(const solver::Problem& problem, std::span<const double> x, double h);

// Largest |J_analytic - J_fd| / max(1, max|J_analytic|).
double jacobian_fd_error(const solver::Problem& problem, std::span<const double> x, double h);

// lower_i <- max(lower_i, delta) for i in `which` (0-based). Throws
// InvalidArgument for delta <= 0 or an index out of range, EmptyBox if a side
// becomes empty.
prox::Box shrink_box(const prox::Box& box, double delta, const std::set<std::size_t>& which);

}  // namespace pgn::problems
