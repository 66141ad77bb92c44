#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "robust/simulate.hpp"

using namespace robust;

namespace {

double lognormal_eu(double x0, double f, double mu, double sigma, double r, double q, double T) {
  const double mean = (r + f * mu - 0.5 * f * f * sigma * sigma) * T;
  const double var = f * f * sigma * sigma * T;
  return std::pow(x0, q) / q * std::exp(q * mean + 0.5 * q * q * var);
}

std::shared_ptr<const PolicyField> uniform_field(const GridSpec& g, const WorstCaseMeasure& nu,
                                                 double frac) {
  const std::size_t n = static_cast<std::size_t>(g.n_t()) * g.n_y();
  return std::make_shared<const PolicyField>(g, std::vector<WorstCaseMeasure>(n, nu),
                                             std::vector<KappaBranch>(n, KappaBranch::low_tail),
                                             std::vector<double>(n, frac));
}

}  // namespace

TEST(Seeds, DistinctStreams) {
  EXPECT_NE(path_seed(1, 0), path_seed(1, 1));
  EXPECT_NE(path_seed(1, 0), path_seed(2, 0));
  EXPECT_EQ(path_seed(5, 9), splitmix64(5 + 9 * 0x9E3779B97F4A7C15ULL));
}

TEST(Moments, MergeMatchesSequential) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(3.0, 2.0);
  RunningMoments all, a, b;
  for (int i = 0; i < 1000; ++i) {
    const double x = n(rng);
    all.add(x);
    (i < 370 ? a : b).add(x);
  }
  a.merge(b);
  EXPECT_EQ(a.n, all.n);
  EXPECT_NEAR(a.mean, all.mean, 1e-12);
  EXPECT_NEAR(a.variance(), all.variance(), 1e-10);
}

TEST(Simulate, LognormalSpecExample) {
  const auto m = fixtures::flat_model(0.5);
  PowerUtility u(0.5);
  SimConfig c;
  c.n_paths = 100000;
  c.n_steps = 20;
  const auto est = simulate_eu(PortfolioPolicy::constant(0.5), AdversaryPolicy::point(0.1, 0.3),
                               m, u, c);
  const double exact = lognormal_eu(1.0, 0.5, 0.1, 0.3, 0.0, 0.5, 1.0);
  EXPECT_NEAR(est.mean, exact, 3 * est.std_error);
  EXPECT_GT(est.std_error, 0.0);
}

TEST(Simulate, LognormalRandomDraws) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int n = 0; n < 5; ++n) {
    const double mu = 0.02 + 0.2 * u01(rng), sigma = 0.1 + 0.4 * u01(rng);
    const double f = -1 + 3 * u01(rng), r = 0.05 * u01(rng), q = u01(rng) < 0.5 ? 0.4 : -1.5;
    MarketModel m(CoefficientFn::constant(0.0), CoefficientFn::constant(0.0),
                  CoefficientFn::constant(r), 0.3);
    SimConfig c;
    c.n_paths = 40000;
    c.n_steps = 10;
    c.seed = 100 + n;
    c.x0 = 0.5 + u01(rng);
    c.horizon = 0.5 + u01(rng);
    const auto est = simulate_eu(PortfolioPolicy::constant(f), AdversaryPolicy::point(mu, sigma),
                                 m, PowerUtility(q), c);
    EXPECT_NEAR(est.mean, lognormal_eu(c.x0, f, mu, sigma, r, q, c.horizon), 3 * est.std_error);
  }
}

TEST(Simulate, NoExposureIsDeterministic) {
  MarketModel m(CoefficientFn::constant(0.0), CoefficientFn::constant(0.0),
                CoefficientFn::constant(0.03), 0.5);
  SimConfig c;
  c.n_paths = 1000;
  c.n_steps = 7;
  c.x0 = 2.0;
  const auto est =
      simulate_eu(PortfolioPolicy::constant(0.0), AdversaryPolicy::point(0.2, 0.3), m,
                  PowerUtility(0.5), c);
  EXPECT_NEAR(est.mean, std::sqrt(2.0 * std::exp(0.03)) / 0.5, 1e-12);
  EXPECT_NEAR(est.std_error, 0.0, 1e-12);
  const auto flat = simulate_eu(PortfolioPolicy::constant(0.0), AdversaryPolicy::point(0.2, 0.3),
                                fixtures::flat_model(), PowerUtility(0.5), c);
  EXPECT_DOUBLE_EQ(flat.mean, std::sqrt(2.0) / 0.5);
  EXPECT_EQ(flat.std_error, 0.0);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  const auto m = fixtures::ramp_model(0.5);
  SimConfig c;
  c.n_paths = 5000;
  c.n_steps = 50;
  c.threads = 1;
  GridSpec g(1.0, 11, 3.0, 7);
  auto pf = uniform_field(g, WorstCaseMeasure::bernoulli(0.1, 0.2, 0.4, 0.3), 0.8);
  std::vector<double> w1, w4;
  const auto a = simulate_eu(PortfolioPolicy::field(pf), AdversaryPolicy::chattering(pf), m,
                             PowerUtility(0.5), c, &w1);
  c.threads = 4;
  const auto b = simulate_eu(PortfolioPolicy::field(pf), AdversaryPolicy::chattering(pf), m,
                             PowerUtility(0.5), c, &w4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(w1, w4);
  for (double x : w1) EXPECT_GT(x, 0.0);
  EXPECT_EQ(a.min_terminal_wealth, *std::min_element(w1.begin(), w1.end()));
}

TEST(Simulate, ChatteringAgreesWithMoments) {
  const auto m = fixtures::ramp_model(0.5);
  SimConfig c;
  c.n_paths = 60000;
  c.n_steps = 100;
  GridSpec g(1.0, 11, 3.0, 7);
  auto pf = uniform_field(g, WorstCaseMeasure::bernoulli(0.15, 0.2, 0.4, 0.4), 1.2);
  PowerUtility u(0.5);
  const auto mom = simulate_eu(PortfolioPolicy::field(pf), AdversaryPolicy::field(pf), m, u, c);
  const auto cha = simulate_eu(PortfolioPolicy::field(pf), AdversaryPolicy::chattering(pf), m, u, c);
  EXPECT_NEAR(mom.mean, cha.mean, 3 * std::hypot(mom.std_error, cha.std_error));

  auto point = uniform_field(g, WorstCaseMeasure::point(0.1, 0.4), 1.0);
  c.n_paths = 2000;
  const auto p1 = simulate_eu(PortfolioPolicy::field(point), AdversaryPolicy::field(point), m, u, c);
  const auto p2 =
      simulate_eu(PortfolioPolicy::field(point), AdversaryPolicy::chattering(point), m, u, c);
  EXPECT_EQ(p1.mean, p2.mean);
}

TEST(Simulate, ConstantMeasureAndLabels) {
  const auto nu = WorstCaseMeasure::bernoulli(0.1, 0.2, 0.4, 0.5);
  const auto adv = AdversaryPolicy::measure(nu);
  EXPECT_EQ(adv.kind(), AdversaryPolicy::Kind::constant_measure);
  EXPECT_TRUE(adv.inside(fixtures::smoke_rect()));
  EXPECT_FALSE(AdversaryPolicy::point(0.5, 0.3).inside(fixtures::smoke_rect()));
  EXPECT_EQ(PortfolioPolicy::constant(0.5).label(), "constant(0.5)");
  SimConfig c;
  c.n_paths = 20000;
  c.n_steps = 10;
  const auto est = simulate_eu(PortfolioPolicy::constant(0.7), adv, fixtures::flat_model(),
                               PowerUtility(0.5), c);
  EXPECT_NEAR(est.mean, lognormal_eu(1.0, 0.7, 0.1, std::sqrt(0.1), 0.0, 0.5, 1.0),
              3 * est.std_error);
}

TEST(Simulate, RejectsBadConfig) {
  SimConfig c;
  c.n_paths = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.n_paths = 10;
  c.n_steps = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.n_steps = 10;
  c.x0 = -1.0;
  EXPECT_THROW(simulate_eu(PortfolioPolicy::constant(0.1), AdversaryPolicy::point(0.1, 0.2),
                           fixtures::flat_model(), PowerUtility(0.5), c),
               std::invalid_argument);
}

TEST(Simulate, NonFinitePathReported) {
  SimConfig c;
  c.n_paths = 10;
  c.n_steps = 5;
  try {
    simulate_eu(PortfolioPolicy::constant(1e200), AdversaryPolicy::point(0.1, 0.2),
                fixtures::flat_model(), PowerUtility(0.5), c);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("path 0"), std::string::npos) << e.what();
  }
}

TEST(Verify, SmallSmokeRunPasses) {
  const auto m = fixtures::flat_model(0.5);
  const auto k = fixtures::smoke_rect();
  PowerUtility u(0.5);
  GridSpec g(1.0, 501, 4.0, 101);
  const auto s = solve_hjbi(m, k, u, g);
  auto pf = std::make_shared<const PolicyField>(build_policy(s, m, k, u));
  SimConfig c;
  c.n_paths = 20000;
  c.n_steps = 50;
  DeviationSpec dev;
  dev.random_points = 2;
  const auto rep = verify_saddle(s, pf, m, k, u, c, dev);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_GE(rep.findings.size(), 1u + 4 + 2 + 1 + 5);
  for (const auto& f : rep.findings) EXPECT_TRUE(f.passed) << f.check << " " << f.adversary;
  c.horizon = 2.0;
  EXPECT_THROW(verify_saddle(s, pf, m, k, u, c, dev), std::invalid_argument);
}
