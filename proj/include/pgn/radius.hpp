#pragma once

// Local convergence theory for proximal Gauss-Newton under a generalized
// Lipschitz condition with L average.
//
//   gamma_lambda(r) = r^-(1+lambda) int_0^r u^lambda L(u) du
//   gamma_c(r)      = r^-2 int_0^r (2r - u) L(u) du
//
// q(r) is the contraction factor on B_r(x*); the convergence radius r_bar is
// the root of q(r) = 1.

#include <functional>
#include <limits>
#include <variant>

#include "pgn/matrix.hpp"

namespace pgn::radius {

struct ConstantL {
  double value = 1.0;
};

// Piecewise-linear interpolation of samples (knots[0] = 0, strictly increasing
// knots, positive non-decreasing values). Defined on [0, knots.back()).
struct TabulatedL {
  Vector knots;
  Vector values;
};

struct CallableL {
  std::function<double(double)> fn;
  double limit = std::numeric_limits<double>::infinity();  // R
};

using LipschitzAverage = std::variant<ConstantL, TabulatedL, CallableL>;

// Throws InvalidArgument if L is not positive and non-decreasing (sampled for
// callables) or a table is malformed.
void validate(const LipschitzAverage& l);

// R, the right end of the domain [0, R).
double domain_limit(const LipschitzAverage& l);

// L(u). Throws OutOfDomain for u outside [0, R).
double evaluate(const LipschitzAverage& l, double u);

struct ProblemConstants {
  double alpha = 0.0;  // ||F(x*)||
  double beta = 1.0;   // ||F'(x*)^dagger||
  double kappa = 1.0;  // ||F'(x*)^dagger|| ||F'(x*)||
};

// Throws InvalidArgument unless alpha >= 0, beta > 0, kappa >= 1.
void validate(const ProblemConstants& c);

enum class LipschitzMode { kCenter, kRadius };

// Throw OutOfDomain for r outside [0, R) and InvalidArgument for lambda < 0.
double gamma_lambda(const LipschitzAverage& l, double lambda, double r);
double gamma_c(const LipschitzAverage& l, double r);

// R_bar = sup { r < R : beta gamma_0(r) r < 1 }.
double upper_radius(const ProblemConstants& c, const LipschitzAverage& l);

// Throws OutOfDomain unless 0 <= r < R_bar.
double q_factor(const ProblemConstants& c, const LipschitzAverage& l, LipschitzMode mode,
                double r);

struct SmallResidual {
  double h = 0.0;
  bool admissible = false;
};

// h = [(1 + sqrt 2) kappa + 1] alpha beta^2 L0, admissible iff h < 1.
SmallResidual check_small_residual(const ProblemConstants& c, double l0);

// Root of q(r) = 1 in (0, R_bar) by bisection to 1e-12, or R_bar when q < 1 on
// the whole interval. Throws ConditionViolated when h >= 1.
double r_bar_numeric(const ProblemConstants& c, const LipschitzAverage& l, LipschitzMode mode);

struct ClosedFormRadius {
  double r_bar = 0.0;        // closed-form value, or the numeric root on a discrepancy
  double closed_form = 0.0;  // closed-form expression
  double numeric = 0.0;      // r_bar_numeric for the same constant average
  bool discrepancy = false;
};

// Constant-L closed forms. Center:
//   (1/(beta L)) [-b + sqrt(b^2 + 2(1-h))],  b = 2 + 3 kappa/2 + (1+sqrt 2) alpha beta^2 L
// Radius:
//   (1/(beta L)) [b - sqrt(b^2 - 2(1-h))],   b = 2 + kappa/2 + (1+sqrt 2) alpha beta^2 L
// The discrepancy flag is set when closed-form and numeric values differ by more than 1e-6.
// Throws ConditionViolated when h >= 1.
ClosedFormRadius r_bar_closed_form(const ProblemConstants& c, double l_const, LipschitzMode mode);

struct ContractionConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

// ||x_{n+1} - x*|| <= C2 ||x_n - x*||^2 + C1 ||x_n - x*|| for x_0 with
// ||x_0 - x*|| = rho0. Throws OutOfDomain unless 0 <= rho0 < R_bar.
ContractionConstants contraction_constants(const ProblemConstants& c, const LipschitzAverage& l,
                                           LipschitzMode mode, double rho0);

}  // namespace pgn::radius
