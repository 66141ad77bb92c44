#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "robust/pde.hpp"

using namespace robust;

namespace {

// Exponent rate of E[X_T^q] for constant coefficients and constant fraction f is
// q (r + f (b + mu)) - q (1 - q) f^2 sigma^2 / 2. The investor maximises E U = e^u / q,
// so for q > 0 this is max_f min_corners and for q < 0 min_f max_corners.
double merton_rate(double b, double r, const UncertaintyRectangle& k, double q) {
  const double sign = q > 0 ? 1.0 : -1.0;
  double best = -INFINITY;
  for (int i = 0; i <= 200000; ++i) {
    const double f = -5.0 + 10.0 * i / 200000;
    double worst = INFINITY;
    for (double mu : {k.mu_minus(), k.mu_plus()})
      for (double s : {k.sigma_minus(), k.sigma_plus()})
        worst = std::min(worst, sign * (q * (r + f * (b + mu)) - 0.5 * q * (1 - q) * f * f * s * s));
    best = std::max(best, worst);
  }
  return sign * best;
}

}  // namespace

TEST(Tail, TerminalAndRateTerm) {
  const auto k = fixtures::smoke_rect();
  const auto flat = fixtures::flat_model();
  EXPECT_EQ(tail_values(1.0, Side::left, flat, k, 0.5, 1.0), 0.0);
  MarketModel with_r(CoefficientFn::constant(0.0), CoefficientFn::constant(0.0),
                     CoefficientFn::constant(0.02), 0.5);
  EXPECT_NEAR(tail_values(0.0, Side::left, with_r, k, 0.5, 1.0) -
                  tail_values(0.0, Side::left, flat, k, 0.5, 1.0),
              0.01, 1e-15);
}

TEST(Tail, MatchesMertonMaxMin) {
  const auto k = fixtures::smoke_rect();
  for (double q : {0.5, 0.3, -1.0}) {
    MarketModel m(CoefficientFn::smooth_ramp(0.05, 0.2, 1.0), CoefficientFn::constant(0.0),
                  CoefficientFn::smooth_ramp(0.0, 0.03, 1.0), 0.5);
    EXPECT_NEAR(tail_values(0.0, Side::left, m, k, q, 1.0), merton_rate(0.05, 0.0, k, q), 1e-9);
    EXPECT_NEAR(tail_values(0.5, Side::right, m, k, q, 1.0), 0.5 * merton_rate(0.2, 0.03, k, q),
                1e-9);
  }
  EXPECT_NEAR(closed_form_b0(0.0, k, 0.5, 1.0), merton_rate(0.0, 0.0, k, 0.5), 1e-9);
}

TEST(ClosedForm, Values) {
  const auto k = fixtures::smoke_rect();
  EXPECT_EQ(closed_form_b0(1.0, k, 0.5, 1.0), 0.0);
  EXPECT_NEAR(closed_form_b0(0.0, k, 0.5, 1.0), 0.03125, 1e-16);
  for (double q : {0.2, 0.5, 0.9}) EXPECT_GT(closed_form_b0(0.3, k, q, 1.0), 0.0);
  EXPECT_LT(closed_form_b0(0.3, k, -2.0, 1.0), 0.0);
}

TEST(Solve, FlatModelIsYConstantAndExact) {
  const auto m = fixtures::flat_model(0.7);
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  GridSpec g(1.0, 2001, 4.0, 201);
  const auto s = solve_hjbi(m, k, u, g);
  for (int i = 0; i < g.n_t(); ++i) {
    const auto row = s.u_level(i);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    EXPECT_LE(*hi - *lo, 1e-8);
    EXPECT_NEAR(row[100], closed_form_b0(g.t(i), k, 0.5, 1.0), 1e-6);
  }
  EXPECT_LE(residual_norm(s, m, k, u), 1e-3);
  EXPECT_EQ(s.diagnostics.time_steps, 2000);
}

TEST(Solve, PointRectangleIsMerton) {
  const auto m = fixtures::flat_model(0.3);
  UncertaintyRectangle k(0.15, 0.15, 0.3, 0.3);
  PowerUtility u(-1.0);
  GridSpec g(2.0, 801, 3.0, 41);
  const auto s = solve_hjbi(m, k, u, g);
  const double expect = 2.0 * -1.0 * 0.15 * 0.15 / (2 * 2.0 * 0.09);
  for (int j = 0; j < g.n_y(); ++j) EXPECT_NEAR(s.u(0, j), expect, 1e-9);
}

TEST(Solve, BoundaryAndTerminalConditions) {
  const auto m = fixtures::ramp_model();
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  GridSpec g(1.0, 401, 4.0, 81);
  const auto s = solve_hjbi(m, k, u, g);
  for (int j = 0; j < g.n_y(); ++j) EXPECT_EQ(s.u(g.n_t() - 1, j), 0.0);
  for (int i = 0; i < g.n_t(); ++i) {
    EXPECT_NEAR(s.u(i, 0), tail_values(g.t(i), Side::left, m, k, 0.5, 1.0), 1e-12);
    EXPECT_NEAR(s.u(i, g.n_y() - 1), tail_values(g.t(i), Side::right, m, k, 0.5, 1.0), 1e-12);
  }
  EXPECT_TRUE(std::isfinite(s.diagnostics.max_abs_u_y));
}

TEST(Residual, ExactSurfaceIsZero) {
  const auto m = fixtures::flat_model();
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  GridSpec g(1.0, 101, 2.0, 21);
  std::vector<double> v;
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_y(); ++j) v.push_back(closed_form_b0(g.t(i), k, 0.5, 1.0));
  ValueSurface s(g, std::move(v));
  EXPECT_LE(residual_norm(s, m, k, u), 1e-8);
}

TEST(Residual, DecreasesUnderRefinement) {
  const auto m = fixtures::ramp_model();
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  GridSpec g(1.0, 201, 4.0, 41);
  double prev = INFINITY, prev_uy = 0.0;
  for (int level = 0; level < 3; ++level) {
    const auto s = solve_hjbi(m, k, u, g);
    const double r = residual_norm(s, m, k, u);
    EXPECT_LT(r, prev);
    if (level) EXPECT_NEAR(s.diagnostics.max_abs_u_y, prev_uy, 0.05 * prev_uy);
    prev = r;
    prev_uy = s.diagnostics.max_abs_u_y;
    g = g.refined();
  }
}

TEST(Solve, LargerUncertaintyNeverHelps) {
  const auto m = fixtures::ramp_model();
  PowerUtility u(0.5);
  GridSpec g(1.0, 401, 4.0, 81);
  const UncertaintyRectangle nested[] = {
      {0.15, 0.3, 0.25, 0.35}, {0.1, 0.3, 0.2, 0.4}, {0.05, 0.3, 0.2, 0.5}, {0.01, 0.35, 0.15, 0.6}};
  double prev = INFINITY;
  for (const auto& k : nested) {
    const auto s = solve_hjbi(m, k, u, g);
    const double v = std::exp(s.u_at(0.0, 0.0)) / 0.5;
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(Solve, Errors) {
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  EXPECT_THROW(solve_hjbi(fixtures::flat_model(), k, u, GridSpec(1.0, 11, 4.0, 201)), SolverError);
  EXPECT_THROW(solve_hjbi(fixtures::ramp_model(), k, u, GridSpec(1.0, 401, 1.0, 21)),
               std::invalid_argument);
  MarketModel bad(CoefficientFn::constant(-0.5), CoefficientFn::constant(0.0),
                  CoefficientFn::constant(0.0), 0.5);
  EXPECT_THROW(solve_hjbi(bad, k, u, GridSpec(1.0, 401, 4.0, 81)), std::invalid_argument);
}

TEST(Solve, ImplicitDiffusionAllowsLargeSteps) {
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  GridSpec g(1.0, 101, 4.0, 201, 1.0);
  EXPECT_TRUE(std::isinf(max_diffusion_dt(g)) || max_diffusion_dt(g) > 1e6);
  const auto s = solve_hjbi(fixtures::ramp_model(), k, u, g);
  EXPECT_GT(s.u_at(0.0, 0.0), 0.0);
}

TEST(Surface, Interpolation) {
  GridSpec g(1.0, 3, 1.0, 3);
  ValueSurface s(g, {0, 1, 2, 3, 4, 5, 6, 7, 8});
  EXPECT_DOUBLE_EQ(s.u_at(0.25, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(s.u(1, 2), 5.0);
  EXPECT_DOUBLE_EQ(s.u_y(1, 1), 1.0);
  EXPECT_THROW(s.u_at(0.5, 1.5), std::out_of_range);
  EXPECT_THROW(s.u_at(-0.1, 0.0), std::out_of_range);
}
