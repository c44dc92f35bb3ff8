#pragma once

// Proximal Gauss-Newton for min_x 1/2 ||F(x)||^2 + J(x):
//
//   z_n     = x_n - F'(x_n)^dagger F(x_n)
//   x_{n+1} = prox_J^{H(x_n)}(z_n),   H(x_n) = F'(x_n)^T F'(x_n)
//
// stopped when ||x_{n+1} - x_n|| < outer_tolerance.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pgn/matrix.hpp"
#include "pgn/prox.hpp"

namespace pgn::solver {

// Residual map x -> F(x) - y on R^n -> R^m with analytic Jacobian.
struct Problem {
  std::size_t n = 0;
  std::size_t m = 0;
  std::function<Vector(std::span<const double>)> residual;
  std::function<Matrix(std::span<const double>)> jacobian;
  // Open validity domain; an empty function accepts every point.
  std::function<bool(std::span<const double>)> validity;
  std::string name;

  bool valid(std::span<const double> x) const;
};

struct SolverConfig {
  double outer_tolerance = 1e-12;
  int max_outer = 200;
  prox::InnerConfig inner;
  double rank_tolerance = 1e-10;
  // Seed the inner loop of step n with x_n (feasible) instead of P_C(z_n).
  bool warm_start_inner = true;
};

struct IterationRecord {
  int index = 0;
  Vector x;                    // x_n
  double residual_norm = 0.0;  // ||F(x_n)||
  double step_norm = 0.0;      // ||x_{n+1} - x_n||
  double jacobian_condition = 0.0;
  int inner_iterations = 0;
  bool inner_converged = true;
  bool gn_point_feasible = true;
  // Inner step actually used, and the two upper bounds quoted for it:
  // 2/||F'||^2 (text) and 1/(2||F'||^2) (algorithm listing).
  double inner_step = 0.0;
  double inner_step_bound_text = 0.0;
  double inner_step_bound_listing = 0.0;
};

enum class SolveStatus { kConverged, kMaxIterations, kJacobianRankDeficient, kLeftDomain };

std::string_view to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::kMaxIterations;
  Vector final_x;
  std::vector<IterationRecord> trace;
  double objective = 0.0;  // 1/2 ||F(final_x)||^2
  bool penalty_feasible = true;
  bool start_projected = false;  // x0 was outside the box and was projected
};

struct StepResult {
  Vector next;
  IterationRecord record;
};

// z = x - F'(x)^dagger F(x) via a Householder least-squares solve.
// Throws InvalidPoint, JacobianRankDeficient.
Vector gauss_newton_point(const Problem& problem, std::span<const double> x,
                          double rank_tolerance = 1e-10);

// One outer iteration. Throws as gauss_newton_point.
StepResult prox_gn_step(const Problem& problem, const prox::Penalty& penalty,
                        std::span<const double> x, const SolverConfig& cfg = {});

// Runs prox_gn_step to termination. Never throws for terminal conditions.
SolveReport solve(const Problem& problem, const prox::Penalty& penalty, std::span<const double> x0,
                  const SolverConfig& cfg = {});

// Violation of -F'(x)^T F(x) in dJ(x): ||F'^T F|| for the zero penalty, the
// distance to the box normal cone for box indicators, and the fixed-point
// residual ||x - prox_J^H(x - F'^dagger F)|| for custom penalties.
// Throws InvalidPoint if x is outside the domain or the box.
double stationarity_residual(const Problem& problem, const prox::Penalty& penalty,
                             std::span<const double> x, const SolverConfig& cfg = {});

struct RateEstimate {
  double q_linear = 0.0;
  double order = 0.0;
  int pairs_used = 0;
};

// Uses e_n = ||x_n - x*||, keeping consecutive pairs with both errors above
// 100 * outer_tolerance; the tail is the last (up to) four such pairs. Throws
// InsufficientData with fewer than three usable pairs or a non-decreasing tail.
RateEstimate estimate_rate(std::span<const Vector> iterates, std::span<const double> x_star,
                           double outer_tolerance = 1e-12);
RateEstimate estimate_rate(std::span<const IterationRecord> trace, std::span<const double> x_star,
                           double outer_tolerance = 1e-12);

// x_0 .. x_{N-1} from the trace followed by final_x.
std::vector<Vector> iterates(const SolveReport& report);

}  // namespace pgn::solver
