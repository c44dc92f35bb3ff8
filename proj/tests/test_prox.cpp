#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "pgn/errors.hpp"
#include "pgn/linalg.hpp"
#include "pgn/oracles.hpp"
#include "pgn/prox.hpp"
#include "test_util.hpp"

namespace pgn::prox {
namespace {

using pgn::testing::random_box;
using pgn::testing::random_matrix;
using pgn::testing::random_vector;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

double kappa_h(const Matrix& a) {
  const Vector s = linalg::singular_values(a);
  return (s.front() * s.front()) / (s.back() * s.back());
}

CustomProx soft_threshold(double weight) {
  return {[weight](std::span<const double> p, double step) {
            Vector out(p.begin(), p.end());
            const double t = weight * step;
            for (double& x : out) x = std::copysign(std::max(std::abs(x) - t, 0.0), x);
            return out;
          },
          "l1"};
}

TEST(Box, RejectsMalformedBounds) {
  EXPECT_THROW(Box({0.0}, {1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(Box({1.0}, {0.0}), InvalidArgument);
  EXPECT_THROW(Box({std::nan("")}, {0.0}), InvalidArgument);
  EXPECT_THROW(Box({kInf}, {kInf}), InvalidArgument);
  EXPECT_NO_THROW(Box({-kInf, 0.0}, {kInf, 0.0}));
}

TEST(Box, ContainsAndViolation) {
  const Box b({-1.0, 0.0}, {1.0, kInf});
  EXPECT_TRUE(b.contains(Vector{0.5, 100.0}));
  EXPECT_FALSE(b.contains(Vector{1.5, 0.0}));
  EXPECT_TRUE(b.contains(Vector{1.0 + 1e-13, 0.0}, 1e-12));
  EXPECT_DOUBLE_EQ(b.max_violation(Vector{1.5, -2.0}), 2.0);
  EXPECT_EQ(b.max_violation(Vector{0.0, 3.0}), 0.0);
}

TEST(ProjectBox, Clamps) {
  const Box b({-1.0, -kInf}, {1.0, 2.0});
  const Vector p = project_box(Vector{-3.0, 5.0}, b);
  EXPECT_EQ(p, (Vector{-1.0, 2.0}));
  EXPECT_THROW(project_box(Vector{1.0}, b), DimensionMismatch);
}

TEST(ProxMetric, ZeroPenaltyIsIdentity) {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {0.0, 1.0}, {1.0, 0.0}});
  const Vector z{0.3, -7.0};
  const ProxOutcome out = prox_metric(ZeroPenalty{}, a, z);
  EXPECT_EQ(out.point, z);
  EXPECT_TRUE(out.converged);
}

TEST(ProxMetric, InteriorPointIsFixed) {
  const Matrix a = Matrix::from_rows({{1.0, 2.0}, {0.0, 1.0}, {1.0, 0.0}});
  const Box b({-1.0, -1.0}, {1.0, 1.0});
  const ProxOutcome out = prox_metric(BoxIndicator{b}, a, Vector{0.2, -0.4});
  EXPECT_EQ(out.point, (Vector{0.2, -0.4}));
  EXPECT_TRUE(out.short_circuited);
  EXPECT_EQ(out.inner_iterations, 0);
}

TEST(ProxMetric, DiagonalMetricReducesToClamping) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    const Vector d = random_vector(rng, 3, 0.5, 3.0);
    const Matrix a = Matrix::diagonal(4, 3, d);
    const Box b = random_box(rng, 3);
    const Vector z = random_vector(rng, 3, -4.0, 4.0);
    const ProxOutcome out = prox_metric(BoxIndicator{b}, a, z);
    EXPECT_TRUE(out.converged);
    EXPECT_LE(distance(out.point, project_box(z, b)), 10.0 * kTol * kappa_h(a));
  }
}

TEST(ProxMetric, AgreesWithEnumerationOracle) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 40; ++t) {
    const Matrix a = random_matrix(rng, 5, 3);
    const Box b = random_box(rng, 3);
    const Vector z = random_vector(rng, 3, -4.0, 4.0);
    const Matrix p = linalg::pseudoinverse(a).pinv;
    const ProxOutcome out = prox_metric(BoxIndicator{b}, a, z);
    ASSERT_TRUE(out.converged);
    const Vector ref = prox_via_pullback(oracles::composed_box_prox(a, p, b), a, p, z);
    // Stopping on a step below tol leaves the iterate within 2 kappa(H) tol.
    EXPECT_LE(distance(out.point, ref), (2.0 * kappa_h(a) + 10.0) * kTol) << "instance " << t;
  }
}

TEST(ProxMetric, AgreesWithGoldenSectionOracle) {
  std::mt19937_64 rng(23);
  const Vector d{2.0, 3.0, 0.7};
  const Matrix a = Matrix::diagonal(5, 3, d);
  const Matrix p = linalg::pseudoinverse(a).pinv;
  for (int t = 0; t < 10; ++t) {
    const Box b = random_box(rng, 3);
    const Vector z = random_vector(rng, 3, -4.0, 4.0);
    const Vector got = prox_metric(BoxIndicator{b}, a, z).point;
    const Vector ref = prox_via_pullback(oracles::composed_box_prox_diagonal(d, b), a, p, z);
    EXPECT_LE(distance(got, ref), 1e-9);
  }
}

TEST(ProxMetric, WarmStartReachesSamePoint) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(rng, 5, 3);
    const Box b = random_box(rng, 3);
    const Vector z = random_vector(rng, 3, -4.0, 4.0);
    const Vector w = random_vector(rng, 3, -2.0, 2.0);
    const Vector cold = prox_metric(BoxIndicator{b}, a, z).point;
    const Vector warm = prox_metric(BoxIndicator{b}, a, z, {}, std::span<const double>(w)).point;
    EXPECT_LE(distance(cold, warm), (4.0 * kappa_h(a) + 10.0) * kTol);
  }
}

TEST(ProxMetric, LipschitzInZ) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 40; ++t) {
    const Matrix a = random_matrix(rng, 5, 3);
    const Box b = random_box(rng, 3);
    const Vector z1 = random_vector(rng, 3, -4.0, 4.0);
    const Vector z2 = random_vector(rng, 3, -4.0, 4.0);
    const Vector p1 = prox_metric(BoxIndicator{b}, a, z1).point;
    const Vector p2 = prox_metric(BoxIndicator{b}, a, z2).point;
    EXPECT_LE(distance(p1, p2), std::sqrt(kappa_h(a)) * distance(z1, z2) + 10.0 * kTol);
  }
}

TEST(ProxMetric, MetricVariationBound) {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 40; ++t) {
    const Matrix a1 = random_matrix(rng, 5, 3);
    const Matrix a2 = random_matrix(rng, 5, 3);
    const Box b = random_box(rng, 3);
    const Vector z = random_vector(rng, 3, -4.0, 4.0);
    const Vector p1 = prox_metric(BoxIndicator{b}, a1, z).point;
    const Vector p2 = prox_metric(BoxIndicator{b}, a2, z).point;
    const double inv_h1 = 1.0 / std::pow(linalg::singular_values(a1).back(), 2);
    const double bound = inv_h1 * norm(multiply(gram(a1) - gram(a2), subtract(z, p2)));
    const double slack = (2.0 * kappa_h(a1) + 2.0 * kappa_h(a2) + 30.0) * kTol;
    EXPECT_LE(distance(p1, p2), bound + slack);
  }
}

TEST(ProxMetric, NormalConeCertificate) {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 40; ++t) {
    const Matrix a = random_matrix(rng, 5, 3);
    const Box b = random_box(rng, 3);
    const Vector z = random_vector(rng, 3, -4.0, 4.0);
    const ProxOutcome out = prox_metric(BoxIndicator{b}, a, z);
    const double nh = std::pow(linalg::operator_norm(a), 2);
    EXPECT_TRUE(in_normal_cone(b, gram(a), z, out.point, (2.0 * kappa_h(a) + 10.0) * kTol * nh));
    EXPECT_LE(inner_fixed_point_residual(b, gram(a), z, out.point, out.step_size), kTol);
    EXPECT_TRUE(b.contains(out.point));
  }
}

TEST(ProxMetric, NonConvergenceIsReported) {
  const Matrix a = Matrix::from_rows({{1.0, 0.9}, {0.9, 1.0}, {0.0, 0.1}});
  const Box b({0.0, 0.0}, {1.0, 1.0});
  const Vector z{1.5, 0.5};
  ASSERT_GT(prox_metric(BoxIndicator{b}, a, z).inner_iterations, 1);
  InnerConfig cfg;
  cfg.max_iterations = 1;
  const ProxOutcome out = prox_metric(BoxIndicator{b}, a, z, cfg);
  EXPECT_FALSE(out.converged);
  EXPECT_EQ(out.inner_iterations, 1);
}

TEST(ProxMetric, ErrorPaths) {
  const Matrix a = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  const Box b({0.0, 0.0}, {1.0, 1.0});
  EXPECT_THROW(prox_metric(BoxIndicator{b}, a, Vector{1.0, 2.0, 3.0}), DimensionMismatch);
  InnerConfig big;
  big.step_rule = FixedStep{2.5};
  EXPECT_THROW(prox_metric(BoxIndicator{b}, a, Vector{3.0, 3.0}, big), StepTooLarge);
  const Matrix singular = Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
  EXPECT_THROW(prox_metric(BoxIndicator{b}, singular, Vector{3.0, 3.0}), RankDeficient);
}

TEST(ProxMetric, FixedStepMatchesDefault) {
  std::mt19937_64 rng(28);
  const Matrix a = random_matrix(rng, 5, 3);
  const Box b = random_box(rng, 3);
  const Vector z = random_vector(rng, 3, -4.0, 4.0);
  InnerConfig cfg;
  cfg.step_rule = FixedStep{1.5 / std::pow(linalg::operator_norm(a), 2)};
  const Vector p0 = prox_metric(BoxIndicator{b}, a, z).point;
  const Vector p1 = prox_metric(BoxIndicator{b}, a, z, cfg).point;
  EXPECT_LE(distance(p0, p1), (4.0 * kappa_h(a) + 10.0) * kTol);
}

TEST(ProxMetric, CustomL1WithDiagonalMetric) {
  // For H = diag(h) the l1 prox separates: soft-threshold z_i at w / h_i.
  const Vector d{1.0, 2.0, 0.5};
  const Matrix a = Matrix::diagonal(3, 3, d);
  const Vector z{0.7, -0.3, 2.0};
  const double w = 0.4;
  const ProxOutcome out = prox_metric(soft_threshold(w), a, z);
  ASSERT_TRUE(out.converged);
  for (std::size_t i = 0; i < 3; ++i) {
    const double t = w / (d[i] * d[i]);
    const double expected = std::copysign(std::max(std::abs(z[i]) - t, 0.0), z[i]);
    EXPECT_NEAR(out.point[i], expected, 1e-10);
  }
}

TEST(ProxMetric, PullbackIdentityForCustomPenalty) {
  // Identity metric: the pull-back through A = I is the prox itself.
  const Matrix a = Matrix::identity(3);
  const Vector z{0.7, -0.3, 2.0};
  const CustomProx l1 = soft_threshold(0.5);
  const Vector direct = prox_metric(l1, a, z).point;
  const Vector pulled = prox_via_pullback(
      [&l1](std::span<const double> y) { return l1.prox(y, 1.0); }, a, a, z);
  EXPECT_LE(distance(direct, pulled), 1e-11);
}

TEST(FirmNonexpansiveness, DetectsValidAndInvalidProx) {
  EXPECT_TRUE(is_firmly_nonexpansive(soft_threshold(0.3), 4, 200, 1));
  const CustomProx doubling{[](std::span<const double> p, double) {
                              Vector out(p.begin(), p.end());
                              for (double& x : out) x *= 2.0;
                              return out;
                            },
                            "doubling"};
  EXPECT_FALSE(is_firmly_nonexpansive(doubling, 4, 200, 1));
}

TEST(Describe, NamesPenalties) {
  EXPECT_FALSE(describe(ZeroPenalty{}).empty());
  EXPECT_NE(describe(soft_threshold(1.0)).find("l1"), std::string::npos);
}

}  // namespace
}  // namespace pgn::prox
