#pragma once

// Proximity operators in the variable metric H = A^T A.
//
// prox_J^H(z) = argmin_v { J(v) + 1/2 ||v - z||_H^2 } is computed by the
// forward-backward iteration
//
//   v_{k+1} = prox_{sigma J}(v_k - sigma H (v_k - z)),
//
// which for a box indicator is the projected-gradient loop with the identity
// metric projection P_C. The pull-back identity
// prox_J^H = A^dagger prox_{J o A^dagger} A is provided as an independent
// route for testing.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "pgn/matrix.hpp"

namespace pgn::prox {

// Closed box prod_i [lower_i, upper_i] with extended-real bounds.
class Box {
 public:
  Box() = default;
  // Throws InvalidArgument on NaN bounds, lower_i > upper_i, a side that
  // admits no finite point, or differing lengths.
  Box(Vector lower, Vector upper);

  static Box unbounded(std::size_t n);

  std::size_t size() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(std::span<const double> x, double slack = 0.0) const;
  // max_i of the distance from x_i to [lower_i, upper_i].
  double max_violation(std::span<const double> x) const;

 private:
  Vector lower_;
  Vector upper_;
};

struct ZeroPenalty {};

struct BoxIndicator {
  Box box;
};

// User-supplied convex penalty J through its scaled identity-metric prox:
// prox(point, step) must return prox_{step * J}(point). Indicators ignore step.
struct CustomProx {
  std::function<Vector(std::span<const double> point, double step)> prox;
  std::string description;
};

using Penalty = std::variant<ZeroPenalty, BoxIndicator, CustomProx>;

std::string describe(const Penalty& penalty);

// sigma = 1 / ||H||.
struct ReciprocalNormH {};
// Caller-chosen sigma; must satisfy 0 < sigma < 2 / ||H||.
struct FixedStep {
  double sigma = 0.0;
};
using StepRule = std::variant<ReciprocalNormH, FixedStep>;

struct InnerConfig {
  double tolerance = 1e-12;
  int max_iterations = 10000;
  StepRule step_rule = ReciprocalNormH{};
  // A is rejected when sigma_min(A) <= rank_tolerance * ||A||.
  double rank_tolerance = 1e-10;
};

struct ProxOutcome {
  Vector point;
  int inner_iterations = 0;
  bool converged = false;
  double final_step_delta = 0.0;
  // Box only: the projection of z already satisfied the optimality certificate.
  bool short_circuited = false;
  double step_size = 0.0;
};

// Componentwise clamp. Throws DimensionMismatch.
Vector project_box(std::span<const double> z, const Box& box);

// Approximates prox_J^H(z) with H = A^T A. A must have full column rank.
// warm_start, when given, seeds the inner loop (projected onto the box for box
// penalties); otherwise the loop starts at project_box(z) (box) or z (custom).
// Throws DimensionMismatch, StepTooLarge, RankDeficient. Non-convergence of
// the inner loop is reported through ProxOutcome::converged.
ProxOutcome prox_metric(const Penalty& penalty, const Matrix& a, std::span<const double> z,
                        const InnerConfig& cfg = {},
                        std::optional<std::span<const double>> warm_start = std::nullopt);

// A^dagger * prox_composed(A z). prox_composed must compute the identity-metric
// prox of J o A^dagger on R^m. Throws ShapeMismatch.
Vector prox_via_pullback(const std::function<Vector(std::span<const double>)>& prox_composed,
                         const Matrix& a, const Matrix& pinv, std::span<const double> z);

// True iff H (z - p) lies in the normal cone of the box at p up to slack:
// (H(z-p))_i <= slack where p_i < upper_i, >= -slack where p_i > lower_i.
bool in_normal_cone(const Box& box, const Matrix& h, std::span<const double> z,
                    std::span<const double> p, double slack);

// ||P_C(v - sigma H (v - z)) - v||, the fixed-point residual of one inner step.
double inner_fixed_point_residual(const Box& box, const Matrix& h, std::span<const double> z,
                                  std::span<const double> v, double sigma);

// Samples random pairs and checks ||p(z1)-p(z2)||^2 <= <p(z1)-p(z2), z1-z2> + tol
// for the unit-step prox. Returns false on the first violation.
bool is_firmly_nonexpansive(const CustomProx& custom, std::size_t dimension, int samples,
                            std::uint64_t seed, double tol = 1e-12);

}  // namespace pgn::prox
