#include "pgn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "pgn/errors.hpp"
#include "pgn/linalg.hpp"

namespace pgn::solver {
namespace {

struct Linearization {
  Vector residual;
  Matrix jacobian;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

Linearization linearize(const Problem& problem, std::span<const double> x, double rank_tolerance) {
  if (x.size() != problem.n) {
    throw DimensionMismatch(problem.name + ": point has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(problem.n));
  }
  if (!problem.valid(x)) throw InvalidPoint(problem.name + ": point outside the validity domain");
  Linearization lin{problem.residual(x), problem.jacobian(x)};
  if (lin.residual.size() != problem.m || lin.jacobian.rows() != problem.m ||
      lin.jacobian.cols() != problem.n) {
    throw DimensionMismatch(problem.name + ": residual or Jacobian has the wrong shape");
  }
  const Vector sv = linalg::singular_values(lin.jacobian);
  lin.sigma_max = sv.front();
  lin.sigma_min = problem.m >= problem.n ? sv.back() : 0.0;
  if (!(lin.sigma_min > rank_tolerance * lin.sigma_max)) {
    throw JacobianRankDeficient(problem.name + ": Jacobian lost numerical column rank");
  }
  return lin;
}

Vector gn_point_from(const Linearization& lin, std::span<const double> x, double rank_tolerance) {
  const Vector d = linalg::solve_least_squares(lin.jacobian, lin.residual, rank_tolerance);
  return subtract(x, d);
}

}  // namespace

bool Problem::valid(std::span<const double> x) const {
  if (x.size() != n) return false;
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) return false;
  return !validity || validity(x);
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged:
      return "Converged";
    case SolveStatus::kMaxIterations:
      return "MaxIterations";
    case SolveStatus::kJacobianRankDeficient:
      return "JacobianRankDeficient";
    case SolveStatus::kLeftDomain:
      return "LeftDomain";
  }
  return "Unknown";
}

Vector gauss_newton_point(const Problem& problem, std::span<const double> x,
                          double rank_tolerance) {
  const Linearization lin = linearize(problem, x, rank_tolerance);
  return gn_point_from(lin, x, rank_tolerance);
}

StepResult prox_gn_step(const Problem& problem, const prox::Penalty& penalty,
                        std::span<const double> x, const SolverConfig& cfg) {
  const Linearization lin = linearize(problem, x, cfg.rank_tolerance);
  const Vector z = gn_point_from(lin, x, cfg.rank_tolerance);

  std::optional<std::span<const double>> warm;
  if (cfg.warm_start_inner) warm = x;
  prox::InnerConfig inner = cfg.inner;
  inner.rank_tolerance = cfg.rank_tolerance;
  prox::ProxOutcome outcome = prox::prox_metric(penalty, lin.jacobian, z, inner, warm);

  const double norm_h = lin.sigma_max * lin.sigma_max;
  IterationRecord rec;
  rec.x.assign(x.begin(), x.end());
  rec.residual_norm = norm(lin.residual);
  rec.step_norm = distance(outcome.point, x);
  rec.jacobian_condition = lin.sigma_max / lin.sigma_min;
  rec.inner_iterations = outcome.inner_iterations;
  rec.inner_converged = outcome.converged;
  rec.gn_point_feasible = std::holds_alternative<prox::ZeroPenalty>(penalty) ||
                          outcome.short_circuited;
  rec.inner_step = outcome.step_size;
  rec.inner_step_bound_text = 2.0 / norm_h;
  rec.inner_step_bound_listing = 0.5 / norm_h;
  return {std::move(outcome.point), std::move(rec)};
}

SolveReport solve(const Problem& problem, const prox::Penalty& penalty,
                  std::span<const double> x0, const SolverConfig& cfg) {
  if (x0.size() != problem.n) {
    throw DimensionMismatch(problem.name + ": x0 has dimension " + std::to_string(x0.size()));
  }
  SolveReport report;
  Vector x(x0.begin(), x0.end());
  if (const auto* box = std::get_if<prox::BoxIndicator>(&penalty)) {
    if (!box->box.contains(x)) {
      x = prox::project_box(x, box->box);
      report.start_projected = true;
    }
  }

  report.status = SolveStatus::kMaxIterations;
  if (!problem.valid(x)) {
    report.status = SolveStatus::kLeftDomain;
  } else {
    for (int n = 0; n < cfg.max_outer; ++n) {
      StepResult step;
      try {
        step = prox_gn_step(problem, penalty, x, cfg);
      } catch (const JacobianRankDeficient&) {
        report.status = SolveStatus::kJacobianRankDeficient;
        break;
      }
      step.record.index = n;
      const bool converged = step.record.step_norm < cfg.outer_tolerance;
      report.trace.push_back(std::move(step.record));
      if (!problem.valid(step.next)) {
        report.status = SolveStatus::kLeftDomain;
        break;
      }
      x = std::move(step.next);
      if (converged) {
        report.status = SolveStatus::kConverged;
        break;
      }
    }
  }

  report.final_x = x;
  if (problem.valid(x)) {
    const double r = norm(problem.residual(x));
    report.objective = 0.5 * r * r;
  } else {
    report.objective = std::numeric_limits<double>::quiet_NaN();
  }
  if (const auto* box = std::get_if<prox::BoxIndicator>(&penalty)) {
    report.penalty_feasible = box->box.contains(x, cfg.inner.tolerance);
  }
  return report;
}

double stationarity_residual(const Problem& problem, const prox::Penalty& penalty,
                             std::span<const double> x, const SolverConfig& cfg) {
  const Linearization lin = linearize(problem, x, cfg.rank_tolerance);
  const Vector grad = multiply_transposed(lin.jacobian, lin.residual);  // F'^T F

  if (std::holds_alternative<prox::ZeroPenalty>(penalty)) return norm(grad);

  if (const auto* box_penalty = std::get_if<prox::BoxIndicator>(&penalty)) {
    const prox::Box& box = box_penalty->box;
    if (!box.contains(x)) throw InvalidPoint(problem.name + ": point outside the box");
    // Distance of g = -F'^T F from the normal cone of the box at x.
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = -grad[i];
      const bool at_lower = x[i] <= box.lower()[i];
      const bool at_upper = x[i] >= box.upper()[i];
      double d = 0.0;
      if (at_lower && at_upper) {
        d = 0.0;
      } else if (at_lower) {
        d = std::max(g, 0.0);
      } else if (at_upper) {
        d = std::max(-g, 0.0);
      } else {
        d = std::abs(g);
      }
      sq += d * d;
    }
    return std::sqrt(sq);
  }

  const Vector z = gn_point_from(lin, x, cfg.rank_tolerance);
  prox::InnerConfig inner = cfg.inner;
  inner.rank_tolerance = cfg.rank_tolerance;
  const prox::ProxOutcome p = prox::prox_metric(penalty, lin.jacobian, z, inner, x);
  return distance(x, p.point);
}

RateEstimate estimate_rate(std::span<const Vector> iterates, std::span<const double> x_star,
                           double outer_tolerance) {
  const double floor = 100.0 * outer_tolerance;
  std::vector<double> err;
  err.reserve(iterates.size());
  for (const Vector& x : iterates) err.push_back(distance(x, x_star));

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    if (err[i] > floor && err[i + 1] > floor) pairs.emplace_back(err[i], err[i + 1]);
  }
  if (pairs.size() < 3) {
    throw InsufficientData("estimate_rate: " + std::to_string(pairs.size()) +
                           " usable error pairs above " + std::to_string(floor) + ", need 3");
  }
  if (pairs.size() > 4) pairs.erase(pairs.begin(), pairs.end() - 4);

  RateEstimate out;
  out.pairs_used = static_cast<int>(pairs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [e0, e1] : pairs) {
    if (!(e1 < e0)) throw InsufficientData("estimate_rate: errors are not decreasing in the tail");
    out.q_linear = std::max(out.q_linear, e1 / e0);
    const double lx = std::log(e0);
    const double ly = std::log(e1);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double k = static_cast<double>(pairs.size());
  const double denom = k * sxx - sx * sx;
  if (!(denom > 0.0)) throw InsufficientData("estimate_rate: errors in the tail are not distinct");
  out.order = (k * sxy - sx * sy) / denom;
  return out;
}

RateEstimate estimate_rate(std::span<const IterationRecord> trace, std::span<const double> x_star,
                           double outer_tolerance) {
  std::vector<Vector> xs;
  xs.reserve(trace.size());
  for (const auto& r : trace) xs.push_back(r.x);
  return estimate_rate(std::span<const Vector>(xs), x_star, outer_tolerance);
}

std::vector<Vector> iterates(const SolveReport& report) {
  std::vector<Vector> xs;
  xs.reserve(report.trace.size() + 1);
  for (const auto& r : report.trace) xs.push_back(r.x);
  xs.push_back(report.final_x);
  return xs;
}

}  // namespace pgn::solver
