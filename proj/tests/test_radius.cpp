#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pgn/errors.hpp"
#include "pgn/radius.hpp"

namespace pgn::radius {
namespace {

const double kRoot2 = std::sqrt(2.0);

CallableL linear_average(double a, double b) {
  return CallableL{[a, b](double u) { return a + b * u; }};
}

TEST(Gamma, ConstantAverage) {
  const LipschitzAverage l = ConstantL{2.0};
  for (double r : {0.0, 0.3, 5.0}) {
    EXPECT_NEAR(gamma_lambda(l, 0.0, r), 2.0, 1e-14);
    EXPECT_NEAR(gamma_lambda(l, 1.0, r), 1.0, 1e-14);
    EXPECT_NEAR(gamma_lambda(l, 2.5, r), 2.0 / 3.5, 1e-14);
    EXPECT_NEAR(gamma_c(l, r), 3.0, 1e-14);
  }
}

TEST(Gamma, LinearAverageClosedForm) {
  // L(u) = a + b u: gamma_lambda(r) = a/(1+lambda) + b r/(2+lambda),
  // gamma_c(r) = 3a/2 + 2 b r / 3.
  const double a = 0.5;
  const double b = 2.0;
  const LipschitzAverage l = linear_average(a, b);
  for (double r : {0.0, 0.1, 0.7, 2.0}) {
    for (double lambda : {0.0, 1.0, 3.0}) {
      EXPECT_NEAR(gamma_lambda(l, lambda, r), a / (1 + lambda) + b * r / (2 + lambda), 1e-11);
    }
    EXPECT_NEAR(gamma_c(l, r), 1.5 * a + 2.0 * b * r / 3.0, 1e-11);
  }
}

TEST(Gamma, TabulatedLinearMatchesCallable) {
  const LipschitzAverage tab = TabulatedL{{0.0, 0.5, 1.0, 3.0}, {0.5, 1.5, 2.5, 6.5}};
  const LipschitzAverage fn = linear_average(0.5, 2.0);
  for (double r : {0.2, 0.5, 0.9, 2.9}) {
    EXPECT_NEAR(gamma_lambda(tab, 0.0, r), gamma_lambda(fn, 0.0, r), 1e-11);
    EXPECT_NEAR(gamma_lambda(tab, 1.0, r), gamma_lambda(fn, 1.0, r), 1e-11);
    EXPECT_NEAR(gamma_c(tab, r), gamma_c(fn, r), 1e-11);
  }
  EXPECT_THROW(gamma_c(tab, 3.0), OutOfDomain);
}

TEST(Gamma, KinkedTableIntegratesExactly) {
  // L = 1 on [0, 1], then 1 + 2(u - 1): int_0^2 L = 2 + 1 = 3, so gamma_0(2) = 1.5.
  const LipschitzAverage tab = TabulatedL{{0.0, 1.0, 4.0}, {1.0, 1.0, 7.0}};
  EXPECT_NEAR(gamma_lambda(tab, 0.0, 2.0), 1.5, 1e-12);
  // int_0^2 u L(u) du = 1/2 + int_1^2 u (2u - 1) du = 1/2 + 14/3 - 3/2 = 11/3.
  EXPECT_NEAR(gamma_lambda(tab, 1.0, 2.0), 11.0 / 12.0, 1e-12);
}

TEST(Gamma, InequalitiesAndIdentity) {
  const std::vector<LipschitzAverage> ls = {
      ConstantL{1.3}, linear_average(0.2, 4.0),
      TabulatedL{{0.0, 0.2, 1.0, 2.0}, {0.1, 1.0, 1.1, 5.0}}};
  for (const LipschitzAverage& l : ls) {
    for (int k = 0; k <= 30; ++k) {
      const double r = 1.9 * k / 30.0;
      const double g0 = gamma_lambda(l, 0.0, r);
      const double g1 = gamma_lambda(l, 1.0, r);
      const double gc = gamma_c(l, r);
      const double lr = evaluate(l, r);
      EXPECT_LE(g0, lr + 1e-12);
      EXPECT_LE(2.0 * g1, lr + 1e-12);
      EXPECT_LE(g1, g0 + 1e-12);
      EXPECT_LE(gc, g0 + 0.5 * lr + 1e-12);
      EXPECT_NEAR(gc, 2.0 * g0 - g1, 1e-11);
    }
  }
}

TEST(Average, ValidationAndDomain) {
  EXPECT_THROW(validate(LipschitzAverage{ConstantL{0.0}}), InvalidArgument);
  EXPECT_THROW(validate(LipschitzAverage{TabulatedL{{0.0, 1.0}, {2.0, 1.0}}}), InvalidArgument);
  EXPECT_THROW(validate(LipschitzAverage{TabulatedL{{0.1, 1.0}, {1.0, 2.0}}}), InvalidArgument);
  EXPECT_THROW(validate(LipschitzAverage{TabulatedL{{0.0, 1.0}, {1.0}}}), InvalidArgument);
  EXPECT_THROW(validate(LipschitzAverage{linear_average(1.0, -1.0)}), InvalidArgument);
  EXPECT_NO_THROW(validate(LipschitzAverage{linear_average(1.0, 1.0)}));
  const LipschitzAverage tab = TabulatedL{{0.0, 2.0}, {1.0, 3.0}};
  EXPECT_EQ(domain_limit(tab), 2.0);
  EXPECT_NEAR(evaluate(tab, 1.0), 2.0, 1e-15);
  EXPECT_THROW(evaluate(tab, 2.0), OutOfDomain);
  EXPECT_THROW(evaluate(tab, -0.1), OutOfDomain);
  EXPECT_TRUE(std::isinf(domain_limit(LipschitzAverage{ConstantL{1.0}})));
  EXPECT_THROW(gamma_lambda(LipschitzAverage{ConstantL{1.0}}, -1.0, 0.5), InvalidArgument);
}

TEST(Constants, Validation) {
  EXPECT_THROW(validate(ProblemConstants{-1.0, 1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(validate(ProblemConstants{0.0, 0.0, 1.0}), InvalidArgument);
  EXPECT_THROW(validate(ProblemConstants{0.0, 1.0, 0.5}), InvalidArgument);
}

TEST(SmallResidual, Formula) {
  const SmallResidual zero = check_small_residual({0.0, 1.0, 1.0}, 1.0);
  EXPECT_EQ(zero.h, 0.0);
  EXPECT_TRUE(zero.admissible);
  const SmallResidual big = check_small_residual({1.0, 1.0, 1.0}, 1.0);
  EXPECT_NEAR(big.h, 2.0 + kRoot2, 1e-14);
  EXPECT_FALSE(big.admissible);
  const SmallResidual mixed = check_small_residual({0.01, 2.0, 3.0}, 0.5);
  EXPECT_NEAR(mixed.h, ((1 + kRoot2) * 3.0 + 1.0) * 0.01 * 4.0 * 0.5, 1e-15);
  EXPECT_THROW(check_small_residual({0.0, 1.0, 1.0}, 0.0), InvalidArgument);
}

TEST(UpperRadius, ConstantAverage) {
  EXPECT_NEAR(upper_radius({0.0, 1.0, 1.0}, ConstantL{1.0}), 1.0, 1e-12);
  EXPECT_NEAR(upper_radius({0.0, 2.0, 1.0}, ConstantL{4.0}), 0.125, 1e-12);
}

TEST(RBar, WorkedInstance) {
  const ProblemConstants c{0.0, 1.0, 1.0};
  const double r = r_bar_numeric(c, ConstantL{1.0}, LipschitzMode::kCenter);
  EXPECT_NEAR(r, (-7.0 + std::sqrt(57.0)) / 2.0, 1e-10);
  EXPECT_NEAR(q_factor(c, ConstantL{1.0}, LipschitzMode::kCenter, r), 1.0, 1e-9);
  EXPECT_EQ(q_factor(c, ConstantL{1.0}, LipschitzMode::kCenter, 0.0), 0.0);
}

TEST(RBar, RadiusModeIsNotSmaller) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const ProblemConstants c{0.05 * u(rng), 0.5 + u(rng), 1.0 + 5.0 * u(rng)};
    const LipschitzAverage l = linear_average(0.2 + u(rng), u(rng));
    if (!check_small_residual(c, evaluate(l, 0.0)).admissible) continue;
    EXPECT_GE(r_bar_numeric(c, l, LipschitzMode::kRadius),
              r_bar_numeric(c, l, LipschitzMode::kCenter) - 1e-12);
  }
}

TEST(RBar, QIsIncreasingBelowRoot) {
  const ProblemConstants c{0.02, 1.2, 2.0};
  const LipschitzAverage l = linear_average(1.0, 0.5);
  const double rb = r_bar_numeric(c, l, LipschitzMode::kCenter);
  double prev = -1.0;
  for (int k = 0; k <= 20; ++k) {
    const double q = q_factor(c, l, LipschitzMode::kCenter, rb * k / 20.0);
    EXPECT_GT(q, prev);
    EXPECT_LE(q, 1.0 + 1e-9);
    prev = q;
  }
  EXPECT_GT(prev, 1.0 - 1e-9);
}

TEST(RBar, ConditionViolated) {
  EXPECT_THROW(r_bar_numeric({1.0, 1.0, 1.0}, ConstantL{1.0}, LipschitzMode::kCenter),
               ConditionViolated);
  EXPECT_THROW(r_bar_closed_form({1.0, 1.0, 1.0}, 1.0, LipschitzMode::kRadius), ConditionViolated);
}

TEST(QFactor, OutOfDomain) {
  const ProblemConstants c{0.0, 1.0, 1.0};
  EXPECT_THROW(q_factor(c, ConstantL{1.0}, LipschitzMode::kCenter, 1.0), OutOfDomain);
  EXPECT_THROW(q_factor(c, ConstantL{1.0}, LipschitzMode::kCenter, -0.1), OutOfDomain);
}

TEST(ClosedForm, AgreesWithNumericRoot) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int used = 0;
  while (used < 60) {
    const ProblemConstants c{0.3 * u(rng), 0.2 + 3.0 * u(rng), 1.0 + 19.0 * u(rng)};
    const double l = 0.1 + 5.0 * u(rng);
    if (!check_small_residual(c, l).admissible) continue;
    ++used;
    for (auto mode : {LipschitzMode::kCenter, LipschitzMode::kRadius}) {
      const ClosedFormRadius cf = r_bar_closed_form(c, l, mode);
      EXPECT_NEAR(cf.closed_form, cf.numeric, 1e-8);
      EXPECT_FALSE(cf.discrepancy);
      EXPECT_EQ(cf.r_bar, cf.closed_form);
    }
  }
}

TEST(ClosedForm, WorkedValues) {
  const ClosedFormRadius center = r_bar_closed_form({0.0, 1.0, 1.0}, 1.0, LipschitzMode::kCenter);
  EXPECT_NEAR(center.closed_form, (-7.0 + std::sqrt(57.0)) / 2.0, 1e-14);
  const ClosedFormRadius radius = r_bar_closed_form({0.0, 1.0, 1.0}, 1.0, LipschitzMode::kRadius);
  EXPECT_NEAR(radius.closed_form, (5.0 - std::sqrt(17.0)) / 2.0, 1e-14);
}

TEST(Contraction, ZeroResidualHasNoLinearTerm) {
  const ContractionConstants k =
      contraction_constants({0.0, 1.3, 2.0}, ConstantL{1.7}, LipschitzMode::kCenter, 0.05);
  EXPECT_EQ(k.c1, 0.0);
  EXPECT_GT(k.c2, 0.0);
}

TEST(Contraction, ConstantAverageArithmetic) {
  // alpha = 0, beta = kappa = L = 1: C2 = gamma_m (1 + rho) / (1 - rho)^2.
  const double rho = 0.1;
  const ContractionConstants center =
      contraction_constants({0.0, 1.0, 1.0}, ConstantL{1.0}, LipschitzMode::kCenter, rho);
  EXPECT_NEAR(center.c2, 1.5 * (1 + rho) / ((1 - rho) * (1 - rho)), 1e-12);
  const ContractionConstants radius =
      contraction_constants({0.0, 1.0, 1.0}, ConstantL{1.0}, LipschitzMode::kRadius, rho);
  EXPECT_NEAR(radius.c2, 0.5 * (1 + rho) / ((1 - rho) * (1 - rho)), 1e-12);
}

TEST(Contraction, LinearTermWithResidual) {
  // C1 = [(1+sqrt2) kappa + 1] alpha beta^2 gamma_0 / (1 - beta gamma_0 rho)^2.
  const ProblemConstants c{0.02, 1.5, 2.0};
  const double l = 0.8;
  const double rho = 0.05;
  const ContractionConstants k = contraction_constants(c, ConstantL{l}, LipschitzMode::kCenter, rho);
  const double d = 1.0 - c.beta * l * rho;
  EXPECT_NEAR(k.c1, ((1 + kRoot2) * c.kappa + 1) * c.alpha * c.beta * c.beta * l / (d * d), 1e-14);
  EXPECT_THROW(contraction_constants(c, ConstantL{l}, LipschitzMode::kCenter, 10.0), OutOfDomain);
}

}  // namespace
}  // namespace pgn::radius
