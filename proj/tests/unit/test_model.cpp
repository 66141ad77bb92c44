#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "robust/model.hpp"

using namespace robust;

TEST(Coefficient, ConstantEverywhere) {
  const auto f = CoefficientFn::constant(0.1);
  EXPECT_EQ(f(5.0), 0.1);
  EXPECT_EQ(f(-1e9), 0.1);
  EXPECT_EQ(f.derivative(3.0), 0.0);
  EXPECT_EQ(f.tail_radius(), 0.0);
}

TEST(Coefficient, RampTailsAndMidpoint) {
  const auto f = CoefficientFn::smooth_ramp(0.0, 0.2, 2.0);
  EXPECT_EQ(f(-3.0), 0.0);
  EXPECT_EQ(f(3.0), 0.2);
  EXPECT_NEAR(f(0.0), 0.1, 1e-15);
  for (double y : {-2.0, -2.5, 2.0, 7.0, -1e6}) {
    EXPECT_EQ(f.derivative(y), 0.0) << y;
    EXPECT_EQ(f(y), y < 0 ? 0.0 : 0.2);
  }
}

TEST(Coefficient, RampDerivativeMatchesFiniteDifference) {
  const auto f = CoefficientFn::smooth_ramp(-0.05, 0.3, 2.0);
  const double h = 1e-6;
  for (double y = -1.9; y < 1.9; y += 0.13) {
    const double fd = (f(y + h) - f(y - h)) / (2 * h);
    EXPECT_NEAR(f.derivative(y), fd, 1e-8) << y;
  }
}

TEST(Coefficient, RampIsMonotoneAndBounded) {
  const auto f = CoefficientFn::smooth_ramp(0.3, -0.1, 1.5);
  double prev = f(-2.0);
  for (double y = -2.0; y <= 2.0; y += 0.01) {
    EXPECT_LE(f(y), prev + 1e-15);
    EXPECT_LE(std::abs(f(y)), f.sup_abs());
    prev = f(y);
  }
}

TEST(Coefficient, PiecewiseLinearClamps) {
  const auto f = CoefficientFn::piecewise_linear({{-1.0, 0.0}, {0.0, 1.0}, {1.0, 0.5}}, 1.0);
  EXPECT_EQ(f(-5.0), 0.0);
  EXPECT_EQ(f(5.0), 0.5);
  EXPECT_DOUBLE_EQ(f(-0.5), 0.5);
  EXPECT_DOUBLE_EQ(f(0.5), 0.75);
  EXPECT_DOUBLE_EQ(f.derivative(0.5), -0.5);
  EXPECT_EQ(f.derivative(1.5), 0.0);
  EXPECT_EQ(f.derivative(-1.0), 0.0);
  EXPECT_EQ(f.derivative(1.0), 0.0);
  MarketModel m(CoefficientFn::constant(0.0), CoefficientFn::constant(0.0), f, 0.5);
  EXPECT_TRUE(validate_assumptions(m, UncertaintyRectangle(0.1, 0.3, 0.2, 0.4)).ok());
  EXPECT_EQ(f.sup_abs(), 1.0);
}

TEST(Coefficient, PiecewiseLinearRejectsBadKnots) {
  EXPECT_THROW(CoefficientFn::piecewise_linear({}, 1.0), std::invalid_argument);
  EXPECT_THROW(CoefficientFn::piecewise_linear({{0.0, 1.0}, {0.0, 2.0}}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(CoefficientFn::piecewise_linear({{-2.0, 1.0}, {0.0, 2.0}}, 1.0),
               std::invalid_argument);
  EXPECT_THROW(CoefficientFn::smooth_ramp(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(Rectangle, MidpointIdentity) {
  for (auto [lo, hi] : {std::pair{0.2, 0.4}, {0.01, 0.99}, {0.3, 0.3}, {0.123, 0.456}}) {
    UncertaintyRectangle k(0.0, 0.1, lo, hi);
    const double half = 0.5 * (hi - lo);
    EXPECT_NEAR(k.sigma_mid() * k.sigma_mid() - half * half, k.sigma_product(), 1e-16);
  }
}

TEST(Rectangle, RejectsInvalid) {
  EXPECT_THROW(UncertaintyRectangle(0.3, 0.1, 0.2, 0.4), std::invalid_argument);
  EXPECT_THROW(UncertaintyRectangle(0.1, 0.3, 0.0, 0.4), std::invalid_argument);
  EXPECT_THROW(UncertaintyRectangle(0.1, 0.3, 0.5, 0.4), std::invalid_argument);
  EXPECT_NO_THROW(UncertaintyRectangle(0.1, 0.1, 0.4, 0.4));
}

TEST(Utility, IncreasingAndConcave) {
  for (double q : {-2.0, -0.5, 0.3, 0.5, 0.9}) {
    PowerUtility u(q);
    for (double x = 0.1; x < 5.0; x += 0.1) {
      EXPECT_LT(u(x), u(x + 0.05));
      EXPECT_LT(u(x) + u(x + 0.2), 2.0 * u(x + 0.1));
    }
  }
  EXPECT_THROW(PowerUtility(0.0), std::invalid_argument);
  EXPECT_THROW(PowerUtility(1.0), std::invalid_argument);
}

TEST(Grid, StepsAndEndpoints) {
  GridSpec g(1.0, 2001, 4.0, 201);
  EXPECT_DOUBLE_EQ(g.dt(), 0.0005);
  EXPECT_DOUBLE_EQ(g.dy(), 0.04);
  EXPECT_EQ(g.t(2000), 1.0);
  EXPECT_EQ(g.y(200), 4.0);
  EXPECT_EQ(g.y(0), -4.0);
  const auto r = g.refined();
  EXPECT_EQ(r.n_t(), 4001);
  EXPECT_EQ(r.n_y(), 401);
  EXPECT_THROW(GridSpec(1.0, 1, 4.0, 201), std::invalid_argument);
  EXPECT_THROW(GridSpec(1.0, 10, 4.0, 2), std::invalid_argument);
  EXPECT_THROW(GridSpec(0.0, 10, 4.0, 11), std::invalid_argument);
  EXPECT_THROW(GridSpec(1.0, 10, 4.0, 11, 1.5), std::invalid_argument);
}

TEST(Model, RhoRange) {
  EXPECT_THROW(fixtures::flat_model(1.2), std::invalid_argument);
  EXPECT_THROW(fixtures::flat_model(-0.1), std::invalid_argument);
}

TEST(Validate, FlatPasses) {
  const auto rep = validate_assumptions(fixtures::flat_model(), fixtures::smoke_rect());
  EXPECT_TRUE(rep.ok());
  EXPECT_GE(rep.points_checked, 401);
}

TEST(Validate, NegativeDriftFailsA3) {
  MarketModel m(CoefficientFn::constant(-0.2), CoefficientFn::constant(0.0),
                CoefficientFn::constant(0.0), 0.5);
  const auto rep = validate_assumptions(m, fixtures::smoke_rect());
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations.front().assumption, "A3");
  EXPECT_NEAR(m.b(rep.violations.front().witness_y) + 0.1, -0.1, 1e-15);
}

TEST(Validate, RampAboveMinusMuPasses) {
  MarketModel m(CoefficientFn::smooth_ramp(-0.05, 0.3, 2.0), CoefficientFn::constant(0.0),
                CoefficientFn::constant(0.0), 0.5);
  EXPECT_TRUE(validate_assumptions(m, fixtures::smoke_rect()).ok());
}

TEST(Validate, RampBelowMinusMuNamesWitness) {
  MarketModel m(CoefficientFn::smooth_ramp(-0.3, 0.3, 2.0), CoefficientFn::constant(0.0),
                CoefficientFn::constant(0.0), 0.5);
  const auto rep = validate_assumptions(m, fixtures::smoke_rect());
  ASSERT_FALSE(rep.ok());
  for (const auto& v : rep.violations) {
    EXPECT_EQ(v.assumption, "A3");
    EXPECT_LT(m.b(v.witness_y) + 0.1, 0.0);
  }
}

TEST(Validate, NegativeRate) {
  MarketModel m(CoefficientFn::constant(0.0), CoefficientFn::constant(0.0),
                CoefficientFn::smooth_ramp(0.01, -0.01, 1.0), 0.5);
  const auto rep = validate_assumptions(m, fixtures::smoke_rect());
  ASSERT_FALSE(rep.ok());
  EXPECT_EQ(rep.violations.front().assumption, "r>=0");
}
