#include "pgn/problems.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "pgn/errors.hpp"

namespace pgn::problems {
namespace {

#include "data/kowalik.inc"
#include "data/osborne1.inc"
#include "data/osborne2.inc"

constexpr double kInf = std::numeric_limits<double>::infinity();

// The benchmark table lists m = 31 for Osborne 1 while the classical data set
// has 33 observations; see osborne1_observations().
constexpr std::size_t kOsborne1Points = 33;

void require_count(std::span<const double> y, std::size_t want, const char* what) {
  if (y.size() != want && !(want == 0 && !y.empty())) {
    throw InvalidArgument(std::string(what) + ": expected " + std::to_string(want) +
                          " observations, got " + std::to_string(y.size()));
  }
}

}  // namespace

solver::Problem rosenbrock() {
  solver::Problem p;
  p.n = 2;
  p.m = 2;
  p.name = "rosenbrock";
  p.residual = [](std::span<const double> x) {
    return Vector{10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]};
  };
  p.jacobian = [](std::span<const double> x) {
    return Matrix(2, 2, {-20.0 * x[0], 10.0, -1.0, 0.0});
  };
  return p;
}

solver::Problem kowalik(std::span<const double> y) {
  require_count(y, kKowalikU.size(), "kowalik");
  Vector obs(y.begin(), y.end());
  solver::Problem p;
  p.n = 4;
  p.m = kKowalikU.size();
  p.name = "kowalik";
  p.residual = [obs](std::span<const double> x) {
    Vector f(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double u = kKowalikU[i];
      const double num = u * u + u * x[1];
      const double den = u * u + u * x[2] + x[3];
      f[i] = x[0] * num / den - obs[i];
    }
    return f;
  };
  p.jacobian = [m = obs.size()](std::span<const double> x) {
    Matrix j(m, 4);
    for (std::size_t i = 0; i < m; ++i) {
      const double u = kKowalikU[i];
      const double num = u * u + u * x[1];
      const double den = u * u + u * x[2] + x[3];
      j(i, 0) = num / den;
      j(i, 1) = x[0] * u / den;
      j(i, 2) = -x[0] * num * u / (den * den);
      j(i, 3) = -x[0] * num / (den * den);
    }
    return j;
  };
  // Rational model: every denominator must stay away from zero.
  p.validity = [](std::span<const double> x) {
    for (double u : kKowalikU) {
      if (u * u + u * x[2] + x[3] == 0.0) return false;
    }
    return true;
  };
  return p;
}

solver::Problem osborne1(std::span<const double> y) {
  require_count(y, kOsborne1Points, "osborne1");
  Vector obs(y.begin(), y.end());
  solver::Problem p;
  p.n = 5;
  p.m = obs.size();
  p.name = "osborne1";
  p.residual = [obs](std::span<const double> x) {
    Vector f(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double t = 10.0 * static_cast<double>(i);
      f[i] = x[0] + x[1] * std::exp(-t * x[3]) + x[2] * std::exp(-t * x[4]) - obs[i];
    }
    return f;
  };
  p.jacobian = [m = obs.size()](std::span<const double> x) {
    Matrix j(m, 5);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = 10.0 * static_cast<double>(i);
      const double e4 = std::exp(-t * x[3]);
      const double e5 = std::exp(-t * x[4]);
      j(i, 0) = 1.0;
      j(i, 1) = e4;
      j(i, 2) = e5;
      j(i, 3) = -t * x[1] * e4;
      j(i, 4) = -t * x[2] * e5;
    }
    return j;
  };
  return p;
}

solver::Problem osborne2(std::span<const double> y) {
  require_count(y, kOsborne2Y.size(), "osborne2");
  Vector obs(y.begin(), y.end());
  solver::Problem p;
  p.n = 11;
  p.m = obs.size();
  p.name = "osborne2";
  p.residual = [obs](std::span<const double> x) {
    Vector f(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double t = static_cast<double>(i) / 10.0;
      const double d9 = t - x[8], d10 = t - x[9], d11 = t - x[10];
      f[i] = x[0] * std::exp(-t * x[4]) + x[1] * std::exp(-d9 * d9 * x[5]) +
             x[2] * std::exp(-d10 * d10 * x[6]) + x[3] * std::exp(-d11 * d11 * x[7]) - obs[i];
    }
    return f;
  };
  p.jacobian = [m = obs.size()](std::span<const double> x) {
    Matrix j(m, 11);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = static_cast<double>(i) / 10.0;
      const double d9 = t - x[8], d10 = t - x[9], d11 = t - x[10];
      const double e1 = std::exp(-t * x[4]);
      const double e2 = std::exp(-d9 * d9 * x[5]);
      const double e3 = std::exp(-d10 * d10 * x[6]);
      const double e4 = std::exp(-d11 * d11 * x[7]);
      j(i, 0) = e1;
      j(i, 1) = e2;
      j(i, 2) = e3;
      j(i, 3) = e4;
      j(i, 4) = -t * x[0] * e1;
      j(i, 5) = -d9 * d9 * x[1] * e2;
      j(i, 6) = -d10 * d10 * x[2] * e3;
      j(i, 7) = -d11 * d11 * x[3] * e4;
      j(i, 8) = 2.0 * d9 * x[5] * x[1] * e2;
      j(i, 9) = 2.0 * d10 * x[6] * x[2] * e3;
      j(i, 10) = 2.0 * d11 * x[7] * x[3] * e4;
    }
    return j;
  };
  return p;
}

std::span<const double> kowalik_observations() { return kKowalikY; }

std::span<const double> osborne1_observations() {
  return std::span<const double>(kOsborne1Y).first(kOsborne1Points);
}

std::span<const double> osborne2_observations() { return kOsborne2Y; }

const std::vector<std::string>& case_names() {
  static const std::vector<std::string> names = {"rosenbrock", "kowalik", "osborne1",
                                                 "osborne2",   "twoeq6",  "teneq1b"};
  return names;
}

CaseInfo case_info(std::string_view name) {
  CaseInfo c;
  c.name = std::string(name);
  if (name == "rosenbrock") {
    c.n = 2;
    c.m = 2;
    c.box = prox::Box({-3.0, -2.0}, {3.0, 0.8});
    c.reference_x = Vector{0.89475, 0.80000};
    c.reference_avg_iterations = 7;
  } else if (name == "kowalik") {
    c.n = 4;
    c.m = 11;
    c.box = prox::Box({0.1928, 0.1916, 0.1234, 0.1362}, {1.0, 1.0, 1.0, 1.0});
    c.reference_x = Vector{0.19281, 0.19165, 0.12340, 0.13620};
    c.reference_avg_iterations = 7;
  } else if (name == "osborne1") {
    c.n = 5;
    c.m = kOsborne1Points;
    c.box = prox::Box({0.3754, 1.0, -2.0, 0.01287, 0.0}, {1.0, 2.0, 0.0, 1.0, 1.0});
    c.reference_x = Vector{0.37546, 1.93569, -1.46461, 0.01287, 0.02212};
    c.reference_avg_iterations = 21;
  } else if (name == "osborne2") {
    c.n = 11;
    c.m = 65;
    c.box = prox::Box({1.31, 0.4314, 0.6336, 0.5, 0.5, 0.6, 1.0, 4.0, 2.0, 4.5689, 5.0},
                      {1.4, 0.8, 1.0, 1.0, 1.0, 3.0, 5.0, 7.0, 2.5, 5.0, 6.0});
    c.reference_x = Vector{1.31000, 0.43157, 0.63367, 0.59941, 0.75423, 0.90423,
                           1.36573, 4.82393, 2.39867, 4.56890, 5.67535};
    c.reference_avg_iterations = 17;
  } else if (name == "twoeq6") {
    c.n = 2;
    c.m = 2;
    c.box = prox::Box({0.0001, 0.0001}, {0.9999, kInf});
    c.reference_x = Vector{0.75739, 0.02130};
    c.reference_avg_iterations = 20;
    c.source = CaseSource::kExternalNle;
    c.fixed_starts = {{0.9, 0.5}, {0.6, 0.1}};
  } else if (name == "teneq1b") {
    c.n = 10;
    c.m = 10;
    c.box = prox::Box({0.0001, 0.0001, 0.0001, 0.0001, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
                      Vector(10, kInf));
    c.reference_x = Vector{2.99763, 3.96642, 79.99969, 0.00236, 0.00060,
                           0.00136, 0.06457, 3.53081, 26.43154, 0.00449};
    c.reference_avg_iterations = 10;
    c.source = CaseSource::kExternalNle;
    c.fixed_starts = {{1, 1, 20, 1, 0, 0, 0, 0, 0, 1}, {2, 5, 40, 1, 0, 0, 0, 0, 0, 5}};
  } else {
    throw UnknownProblem("unknown benchmark case '" + std::string(name) + "'");
  }
  return c;
}

BenchmarkCase get_case(std::string_view name) {
  CaseInfo info = case_info(name);
  if (info.source == CaseSource::kExternalNle) {
    throw ExternalDefinitionUnavailable(
        "case '" + info.name +
        "' comes from the NLE library; its equations are not bundled with this build");
  }
  solver::Problem problem;
  if (name == "rosenbrock") {
    problem = rosenbrock();
  } else if (name == "kowalik") {
    problem = kowalik(kowalik_observations());
  } else if (name == "osborne1") {
    problem = osborne1(osborne1_observations());
  } else {
    problem = osborne2(osborne2_observations());
  }
  return {std::move(problem), std::move(info)};
}

Matrix finite_diff_jacobian(const solver::Problem& problem, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_diff_jacobian: h must be positive");
  if (!problem.valid(x)) throw InvalidPoint(problem.name + ": point outside the domain");
  Matrix j(problem.m, problem.n);
  Vector xp(x.begin(), x.end());
  Vector xm(x.begin(), x.end());
  for (std::size_t c = 0; c < problem.n; ++c) {
    xp[c] = x[c] + h;
    xm[c] = x[c] - h;
    if (!problem.valid(xp) || !problem.valid(xm)) {
      throw InvalidPoint(problem.name + ": difference stencil leaves the domain");
    }
    const Vector fp = problem.residual(xp);
    const Vector fm = problem.residual(xm);
    for (std::size_t r = 0; r < problem.m; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    xp[c] = x[c];
    xm[c] = x[c];
  }
  return j;
}

double jacobian_fd_error(const solver::Problem& problem, std::span<const double> x, double h) {
  const Matrix analytic = problem.jacobian(x);
  const Matrix numeric = finite_diff_jacobian(problem, x, h);
  double scale = 1.0;
  for (double v : analytic.values()) scale = std::max(scale, std::abs(v));
  return max_abs_difference(analytic, numeric) / scale;
}

prox::Box shrink_box(const prox::Box& box, double delta, const std::set<std::size_t>& which) {
  if (!(delta > 0.0)) throw InvalidArgument("shrink_box: delta must be positive");
  Vector lower = box.lower();
  for (std::size_t i : which) {
    if (i >= lower.size()) throw InvalidArgument("shrink_box: coordinate index out of range");
    lower[i] = std::max(lower[i], delta);
    if (lower[i] > box.upper()[i]) {
      throw EmptyBox("shrink_box: coordinate " + std::to_string(i) + " becomes empty");
    }
  }
  return prox::Box(std::move(lower), box.upper());
}

}  // namespace pgn::problems
