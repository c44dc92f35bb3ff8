#include "pgn/radius.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgn/errors.hpp"

namespace pgn::radius {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);
constexpr double kQuadratureTolerance = 1e-10;
constexpr double kRootTolerance = 1e-12;

struct Interval {
  double a, b, fa, fm, fb, whole;
};

template <class G>
double simpson_recurse(const G& g, const Interval& iv, double eps, int depth) {
  const double m = 0.5 * (iv.a + iv.b);
  const double lm = 0.5 * (iv.a + m);
  const double rm = 0.5 * (m + iv.b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = (m - iv.a) / 6.0 * (iv.fa + 4.0 * flm + iv.fm);
  const double right = (iv.b - m) / 6.0 * (iv.fm + 4.0 * frm + iv.fb);
  const double diff = left + right - iv.whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
  return simpson_recurse(g, {iv.a, m, iv.fa, flm, iv.fm, left}, 0.5 * eps, depth - 1) +
         simpson_recurse(g, {m, iv.b, iv.fm, frm, iv.fb, right}, 0.5 * eps, depth - 1);
}

// Adaptive Simpson on [a, b] to relative tolerance `rel` (absolute near zero).
template <class G>
double adaptive_simpson(const G& g, double a, double b, double rel) {
  const double fa = g(a);
  const double fb = g(b);
  const double fm = g(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(std::abs(whole), 1e-300);
  return simpson_recurse(g, {a, b, fa, fm, fb, whole}, rel * scale, 48);
}

// int_0^1 w(t) L(r t) dt, split at the table knots so that every piece is smooth.
template <class W>
double scaled_integral(const LipschitzAverage& l, double r, const W& weight) {
  std::vector<double> cuts{0.0};
  if (const auto* tab = std::get_if<TabulatedL>(&l)) {
    for (double k : tab->knots) {
      if (k > 0.0 && k < r) cuts.push_back(k / r);
    }
  }
  cuts.push_back(1.0);
  const auto g = [&](double t) { return weight(t) * evaluate(l, r * t); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += adaptive_simpson(g, cuts[i], cuts[i + 1], 0.1 * kQuadratureTolerance);
  }
  return total;
}

void check_radius(const LipschitzAverage& l, double r, const char* what) {
  if (!(r >= 0.0) || !(r < domain_limit(l))) {
    throw OutOfDomain(std::string(what) + ": r = " + std::to_string(r) + " outside [0, R)");
  }
}

double gamma0_unchecked(const LipschitzAverage& l, double r) {
  if (const auto* c = std::get_if<ConstantL>(&l)) return c->value;
  if (r == 0.0) return evaluate(l, 0.0);
  return scaled_integral(l, r, [](double) { return 1.0; });
}

double gamma_mode(const LipschitzAverage& l, LipschitzMode mode, double r) {
  return mode == LipschitzMode::kCenter ? gamma_c(l, r) : gamma_lambda(l, 1.0, r);
}

// q(r), or +inf where 1 - beta gamma_0(r) r <= 0 or r >= R.
double q_or_inf(const ProblemConstants& c, const LipschitzAverage& l, LipschitzMode mode,
                double r) {
  if (!(r < domain_limit(l))) return kInf;
  const double g0 = gamma0_unchecked(l, r);
  const double d = 1.0 - c.beta * g0 * r;
  if (!(d > 0.0)) return kInf;
  const double gm = gamma_mode(l, mode, r);
  const double a = c.alpha;
  const double b = c.beta;
  const double k = c.kappa;
  const double braces = (b * g0 * gm * r * r + k * gm * r) / d +
                        (1.0 + kSqrt2) * a * b * b * g0 * g0 * r / d +
                        ((1.0 + kSqrt2) * k + 1.0) * a * b * g0 / d;
  return b / d * braces;
}

double require_admissible(const ProblemConstants& c, double l0) {
  const SmallResidual s = check_small_residual(c, l0);
  if (!s.admissible) {
    throw ConditionViolated("small-residual condition fails: h = " + std::to_string(s.h) +
                            " >= 1");
  }
  return s.h;
}

}  // namespace

void validate(const LipschitzAverage& l) {
  if (const auto* c = std::get_if<ConstantL>(&l)) {
    if (!(c->value > 0.0) || !std::isfinite(c->value)) {
      throw InvalidArgument("constant L must be positive and finite");
    }
    return;
  }
  if (const auto* t = std::get_if<TabulatedL>(&l)) {
    if (t->knots.size() < 2 || t->knots.size() != t->values.size()) {
      throw InvalidArgument("tabulated L needs at least two knots and one value per knot");
    }
    if (t->knots.front() != 0.0) throw InvalidArgument("tabulated L must start at u = 0");
    for (std::size_t i = 0; i < t->knots.size(); ++i) {
      if (!std::isfinite(t->knots[i]) || !std::isfinite(t->values[i]) || !(t->values[i] > 0.0)) {
        throw InvalidArgument("tabulated L: knots and values must be finite, values positive");
      }
      if (i > 0 && !(t->knots[i] > t->knots[i - 1])) {
        throw InvalidArgument("tabulated L: knots must be strictly increasing");
      }
      if (i > 0 && t->values[i] < t->values[i - 1]) {
        throw InvalidArgument("tabulated L: values must be non-decreasing");
      }
    }
    return;
  }
  const auto& f = std::get<CallableL>(l);
  if (!f.fn) throw InvalidArgument("callable L is empty");
  if (!(f.limit > 0.0)) throw InvalidArgument("callable L: R must be positive");
  const double span = std::isfinite(f.limit) ? f.limit * (1.0 - 1e-9) : 100.0;
  constexpr int kSamples = 256;
  double previous = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double u = span * i / kSamples;
    const double v = f.fn(u);
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw InvalidArgument("callable L is not positive at u = " + std::to_string(u));
    }
    if (i > 0 && v < previous) {
      throw InvalidArgument("callable L decreases near u = " + std::to_string(u));
    }
    previous = v;
  }
}

double domain_limit(const LipschitzAverage& l) {
  if (std::holds_alternative<ConstantL>(l)) return kInf;
  if (const auto* t = std::get_if<TabulatedL>(&l)) return t->knots.back();
  return std::get<CallableL>(l).limit;
}

double evaluate(const LipschitzAverage& l, double u) {
  if (!(u >= 0.0) || !(u < domain_limit(l))) {
    throw OutOfDomain("L average evaluated at u = " + std::to_string(u) + " outside [0, R)");
  }
  if (const auto* c = std::get_if<ConstantL>(&l)) return c->value;
  if (const auto* t = std::get_if<TabulatedL>(&l)) {
    const auto it = std::upper_bound(t->knots.begin(), t->knots.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - t->knots.begin()) - 1;
    const double w = (u - t->knots[i]) / (t->knots[i + 1] - t->knots[i]);
    return t->values[i] + w * (t->values[i + 1] - t->values[i]);
  }
  return std::get<CallableL>(l).fn(u);
}

void validate(const ProblemConstants& c) {
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) {
    throw InvalidArgument("alpha must be finite and >= 0");
  }
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) {
    throw InvalidArgument("beta must be finite and > 0");
  }
  if (!(c.kappa >= 1.0) || !std::isfinite(c.kappa)) {
    throw InvalidArgument("kappa must be finite and >= 1");
  }
}

double gamma_lambda(const LipschitzAverage& l, double lambda, double r) {
  if (!(lambda >= 0.0)) throw InvalidArgument("gamma_lambda: lambda must be >= 0");
  check_radius(l, r, "gamma_lambda");
  if (const auto* c = std::get_if<ConstantL>(&l)) return c->value / (1.0 + lambda);
  if (r == 0.0) return evaluate(l, 0.0) / (1.0 + lambda);
  if (lambda == 0.0) return gamma0_unchecked(l, r);
  return scaled_integral(l, r, [lambda](double t) { return std::pow(t, lambda); });
}

double gamma_c(const LipschitzAverage& l, double r) {
  check_radius(l, r, "gamma_c");
  if (const auto* c = std::get_if<ConstantL>(&l)) return 1.5 * c->value;
  if (r == 0.0) return 1.5 * evaluate(l, 0.0);
  return scaled_integral(l, r, [](double t) { return 2.0 - t; });
}

double upper_radius(const ProblemConstants& c, const LipschitzAverage& l) {
  validate(c);
  if (const auto* k = std::get_if<ConstantL>(&l)) return 1.0 / (c.beta * k->value);
  const double limit = domain_limit(l);
  const auto below = [&](double r) { return c.beta * gamma0_unchecked(l, r) * r < 1.0; };

  double lo = 0.0;
  double hi = limit;
  if (!std::isfinite(limit)) {
    hi = 1.0;
    while (below(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return kInf;
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? lo : hi) = mid;
  }
  return hi;
}

double q_factor(const ProblemConstants& c, const LipschitzAverage& l, LipschitzMode mode,
                double r) {
  validate(c);
  check_radius(l, r, "q_factor");
  const double q = q_or_inf(c, l, mode, r);
  if (!std::isfinite(q)) {
    throw OutOfDomain("q_factor: 1 - beta gamma_0(r) r <= 0 at r = " + std::to_string(r));
  }
  return q;
}

SmallResidual check_small_residual(const ProblemConstants& c, double l0) {
  if (!(l0 > 0.0)) throw InvalidArgument("check_small_residual: L(0) must be positive");
  SmallResidual s;
  s.h = ((1.0 + kSqrt2) * c.kappa + 1.0) * c.alpha * c.beta * c.beta * l0;
  s.admissible = s.h < 1.0;
  return s;
}

double r_bar_numeric(const ProblemConstants& c, const LipschitzAverage& l, LipschitzMode mode) {
  validate(c);
  require_admissible(c, evaluate(l, 0.0));
  const double r_upper = upper_radius(c, l);

  double lo = 0.0;
  double hi = r_upper;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (q_or_inf(c, l, mode, hi) < 1.0) {
      lo = hi;
      hi *= 2.0;
    }
  }
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (q_or_inf(c, l, mode, mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ClosedFormRadius r_bar_closed_form(const ProblemConstants& c, double l_const, LipschitzMode mode) {
  validate(c);
  if (!(l_const > 0.0) || !std::isfinite(l_const)) {
    throw InvalidArgument("r_bar_closed_form: L must be positive and finite");
  }
  const double h = require_admissible(c, l_const);
  const double bl = c.beta * l_const;
  const double a = (1.0 + kSqrt2) * c.alpha * c.beta * c.beta * l_const;

  ClosedFormRadius out;
  if (mode == LipschitzMode::kCenter) {
    const double b = 2.0 + 1.5 * c.kappa + a;
    out.closed_form = (-b + std::sqrt(b * b + 2.0 * (1.0 - h))) / bl;
  } else {
    const double b = 2.0 + 0.5 * c.kappa + a;
    out.closed_form = (b - std::sqrt(b * b - 2.0 * (1.0 - h))) / bl;
  }
  out.numeric = r_bar_numeric(c, ConstantL{l_const}, mode);
  out.discrepancy = !(std::abs(out.closed_form - out.numeric) <= 1e-6);
  out.r_bar = out.discrepancy ? out.numeric : out.closed_form;
  return out;
}

ContractionConstants contraction_constants(const ProblemConstants& c, const LipschitzAverage& l,
                                           LipschitzMode mode, double rho0) {
  validate(c);
  check_radius(l, rho0, "contraction_constants");
  const double g0 = gamma0_unchecked(l, rho0);
  const double d = 1.0 - c.beta * g0 * rho0;
  if (!(d > 0.0)) {
    throw OutOfDomain("contraction_constants: rho0 = " + std::to_string(rho0) + " >= R_bar");
  }
  const double gm = gamma_mode(l, mode, rho0);
  const double a = c.alpha;
  const double b = c.beta;
  ContractionConstants out;
  out.c1 = ((1.0 + kSqrt2) * c.kappa + 1.0) * a * b * b * g0 / (d * d);
  out.c2 = (c.kappa * b * gm + (1.0 + kSqrt2) * a * b * b * b * g0 * g0 + b * b * g0 * gm * rho0) /
           (d * d);
  return out;
}

}  // namespace pgn::radius
