#include "pgn/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "pgn/errors.hpp"
#include "pgn/kernels.hpp"
#include "pgn/linalg.hpp"

namespace pgn::prox {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dimension(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(want) +
                            ", got " + std::to_string(got));
  }
}

double step_size(const StepRule& rule, double norm_h) {
  if (std::holds_alternative<ReciprocalNormH>(rule)) return 1.0 / norm_h;
  const double sigma = std::get<FixedStep>(rule).sigma;
  if (!(sigma > 0.0) || !(sigma < 2.0 / norm_h)) {
    throw StepTooLarge("prox_metric: fixed step " + std::to_string(sigma) +
                       " outside (0, 2/||H||) with 2/||H|| = " + std::to_string(2.0 / norm_h));
  }
  return sigma;
}

// Shared forward-backward driver. `backward` maps the forward point in place.
template <class Backward>
ProxOutcome forward_backward(const Matrix& h, std::span<const double> z, Vector v, double sigma,
                             const InnerConfig& cfg, std::span<const double> lower,
                             std::span<const double> upper, Backward&& backward) {
  const std::size_t n = z.size();
  const auto& k = kernels::active();
  Vector hz(n);
  k.gemv(h.data(), n, n, z.data(), hz.data());
  Vector next(n);

  ProxOutcome out;
  out.step_size = sigma;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    double delta2 = k.projected_step(h.data(), n, v.data(), hz.data(), sigma, lower.data(),
                                     upper.data(), next.data());
    if (backward(next)) delta2 = k.squared_distance(next.data(), v.data(), n);
    v.swap(next);
    out.inner_iterations = it;
    out.final_step_delta = std::sqrt(delta2);
    if (out.final_step_delta < cfg.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.point = std::move(v);
  return out;
}

}  // namespace

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw InvalidArgument("Box: bound vectors differ in length");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    const double a = lower_[i];
    const double b = upper_[i];
    if (std::isnan(a) || std::isnan(b)) throw InvalidArgument("Box: NaN bound");
    if (a > b) {
      throw InvalidArgument("Box: lower > upper at coordinate " + std::to_string(i));
    }
    if (a == kInf || b == -kInf) throw InvalidArgument("Box: side contains no finite point");
  }
}

Box Box::unbounded(std::size_t n) { return Box(Vector(n, -kInf), Vector(n, kInf)); }

bool Box::contains(std::span<const double> x, double slack) const {
  return x.size() == size() && max_violation(x) <= slack;
}

double Box::max_violation(std::span<const double> x) const {
  require_dimension(x.size(), size(), "Box::max_violation");
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    v = std::max({v, lower_[i] - x[i], x[i] - upper_[i]});
  }
  return v;
}

std::string describe(const Penalty& penalty) {
  struct Visitor {
    std::string operator()(const ZeroPenalty&) const { return "zero"; }
    std::string operator()(const BoxIndicator& b) const {
      return "box(" + std::to_string(b.box.size()) + ")";
    }
    std::string operator()(const CustomProx& c) const { return "custom: " + c.description; }
  };
  return std::visit(Visitor{}, penalty);
}

Vector project_box(std::span<const double> z, const Box& box) {
  require_dimension(z.size(), box.size(), "project_box");
  Vector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::min(std::max(z[i], box.lower()[i]), box.upper()[i]);
  }
  return out;
}

bool in_normal_cone(const Box& box, const Matrix& h, std::span<const double> z,
                    std::span<const double> p, double slack) {
  const Vector g = multiply(h, subtract(z, p));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (p[i] < box.upper()[i] && g[i] > slack) return false;
    if (p[i] > box.lower()[i] && g[i] < -slack) return false;
  }
  return true;
}

double inner_fixed_point_residual(const Box& box, const Matrix& h, std::span<const double> z,
                                  std::span<const double> v, double sigma) {
  const Vector g = multiply(h, subtract(v, z));
  Vector step(v.begin(), v.end());
  for (std::size_t i = 0; i < step.size(); ++i) step[i] -= sigma * g[i];
  return distance(project_box(step, box), v);
}

ProxOutcome prox_metric(const Penalty& penalty, const Matrix& a, std::span<const double> z,
                        const InnerConfig& cfg, std::optional<std::span<const double>> warm_start) {
  const std::size_t n = a.cols();
  require_dimension(z.size(), n, "prox_metric");
  if (warm_start) require_dimension(warm_start->size(), n, "prox_metric warm start");
  if (!(cfg.tolerance > 0.0) || cfg.max_iterations < 1) {
    throw InvalidArgument("prox_metric: tolerance and max_iterations must be positive");
  }

  if (std::holds_alternative<ZeroPenalty>(penalty)) {
    return {Vector(z.begin(), z.end()), 0, true, 0.0, false, 0.0};
  }

  const Vector sv = linalg::singular_values(a);
  if (a.rows() < n || !(sv.back() > cfg.rank_tolerance * sv.front())) {
    throw RankDeficient("prox_metric: metric A^T A is singular");
  }
  const double norm_h = sv.front() * sv.front();
  const double sigma = step_size(cfg.step_rule, norm_h);
  const Matrix h = gram(a);

  if (const auto* box_penalty = std::get_if<BoxIndicator>(&penalty)) {
    const Box& box = box_penalty->box;
    require_dimension(box.size(), n, "prox_metric box");
    Vector start = project_box(z, box);
    if (in_normal_cone(box, h, z, start, 10.0 * cfg.tolerance * norm_h)) {
      return {std::move(start), 0, true, 0.0, true, sigma};
    }
    if (warm_start) start = project_box(*warm_start, box);
    return forward_backward(h, z, std::move(start), sigma, cfg, box.lower(), box.upper(),
                            [](Vector&) { return false; });
  }

  const auto& custom = std::get<CustomProx>(penalty);
  const Vector lower(n, -kInf);
  const Vector upper(n, kInf);
  Vector start = warm_start ? Vector(warm_start->begin(), warm_start->end())
                            : Vector(z.begin(), z.end());
  // projected_step computes the forward step; the custom prox is the backward step.
  return forward_backward(h, z, std::move(start), sigma, cfg, lower, upper,
                          [&](Vector& forward) {
                            Vector mapped = custom.prox(forward, sigma);
                            require_dimension(mapped.size(), n, "custom prox output");
                            forward = std::move(mapped);
                            return true;
                          });
}

Vector prox_via_pullback(const std::function<Vector(std::span<const double>)>& prox_composed,
                         const Matrix& a, const Matrix& pinv, std::span<const double> z) {
  if (pinv.rows() != a.cols() || pinv.cols() != a.rows()) {
    throw ShapeMismatch("prox_via_pullback: pinv shape does not match A^T");
  }
  if (z.size() != a.cols()) throw ShapeMismatch("prox_via_pullback: z length differs from cols");
  const Vector image = prox_composed(multiply(a, z));
  if (image.size() != a.rows()) throw ShapeMismatch("prox_via_pullback: composed prox output");
  return multiply(pinv, image);
}

bool is_firmly_nonexpansive(const CustomProx& custom, std::size_t dimension, int samples,
                            std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 3.0);
  Vector z1(dimension), z2(dimension);
  for (int s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < dimension; ++i) {
      z1[i] = gauss(rng);
      z2[i] = gauss(rng);
    }
    const Vector p1 = custom.prox(z1, 1.0);
    const Vector p2 = custom.prox(z2, 1.0);
    const Vector dp = subtract(p1, p2);
    const Vector dz = subtract(z1, z2);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < dimension; ++i) {
      lhs += dp[i] * dp[i];
      rhs += dp[i] * dz[i];
    }
    if (lhs > rhs + tol * std::max(1.0, rhs)) return false;
  }
  return true;
}

}  // namespace pgn::prox
