#include <gtest/gtest.h>

#include <cmath>

#include "winfer/instances.hpp"
#include "winfer/error.hpp"
#include "winfer/testing.hpp"

using namespace winfer;
using namespace winfer::instances;

namespace {

HypothesisProblem binary(std::vector<double> p, std::vector<double> q, std::vector<double> w) {
  return {Distribution::finite(std::move(p)), Distribution::finite(std::move(q)),
          WeightFunction::table(std::move(w))};
}

const HypothesisProblem kExample = binary({0.5, 0.5}, {0.25, 0.75}, {2, 1});

}  // namespace

TEST(ErrorLosses, Examples) {
  auto l0 = error_losses(kExample, DecisionRule::constant(0));
  EXPECT_EQ(l0.type1, 0.0);
  EXPECT_NEAR(l0.type2, 2 * 0.25 + 0.75, 1e-15);
  auto l1 = error_losses(kExample, DecisionRule::constant(1));
  EXPECT_NEAR(l1.type1, 1.5, 1e-15);
  EXPECT_EQ(l1.type2, 0.0);
  auto lo = error_losses(kExample, optimal_rule(kExample));
  EXPECT_NEAR(lo.type1, 0.5, 1e-15);
  EXPECT_NEAR(lo.type2, 0.5, 1e-15);
  EXPECT_THROW(DecisionRule::table({0.5, 1.5}), Error);
}

TEST(OptimalRule, Examples) {
  EXPECT_EQ(optimal_rule(binary({0.3, 0.7}, {0.3, 0.7}, {1, 1})).values(), (std::vector<double>{0, 0}));
  EXPECT_EQ(optimal_rule(kExample).values(), (std::vector<double>{0, 1}));
  HypothesisProblem g{Distribution::normal(0, 1), Distribution::normal(2, 1), WeightFunction::constant(1)};
  auto d = optimal_rule(g);
  EXPECT_EQ(d(0.999), 0.0);
  EXPECT_EQ(d(1.001), 1.0);
  EXPECT_EQ(d(-5.0), 0.0);
  auto l = error_losses(g, d);
  EXPECT_NEAR(l.type1 + l.type2, min_total_error(g).value, 1e-9);
}

TEST(MinTotalError, Examples) {
  EXPECT_NEAR(min_total_error(binary({0.3, 0.7}, {0.3, 0.7}, {1, 1})).value, 1.0, 1e-15);
  EXPECT_NEAR(min_total_error(kExample).value, 1.0, 1e-15);
  EXPECT_EQ(min_total_error(binary({1, 0}, {0, 1}, {1, 1})).value, 0.0);
}

TEST(MinTotalError, BeatsEveryDeterministicAndRandomizedRule) {
  Rng rng(31);
  for (int t = 0; t < 60; ++t) {
    const std::size_t m = 1 + t % 8;
    auto pr = random_finite_problem(rng, m);
    const double opt = min_total_error(pr).value;
    double best = INFINITY;
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      std::vector<double> d(m);
      for (std::size_t i = 0; i < m; ++i) d[i] = (mask >> i) & 1;
      auto l = error_losses(pr, DecisionRule::table(d));
      best = std::min(best, l.type1 + l.type2);
    }
    EXPECT_NEAR(best, opt, 1e-12);
    for (int r = 0; r < 20; ++r) {
      std::vector<double> d(m);
      for (auto& v : d) v = rng.uniform();
      auto l = error_losses(pr, DecisionRule::table(d));
      EXPECT_GE(l.type1 + l.type2, opt - 1e-12);
    }
  }
}

TEST(BoundReport, CollapsedChain) {
  auto pr = binary({0.4, 0.6}, {0.4, 0.6}, {1, 1});
  auto r = error_bound_report(pr);
  EXPECT_NEAR(r.rho, 1.0, 1e-15);
  EXPECT_NEAR(r.lower_quadratic, 0.5, 1e-15);
  EXPECT_NEAR(r.lower_sqrt, 1.0, 1e-7);
  EXPECT_NEAR(r.min_total_error, 1.0, 1e-15);
  for (const auto& c : r.checks)
    if (c.name.rfind("chain:", 0) == 0) EXPECT_TRUE(c.holds) << c.name;
}

TEST(BoundReport, ChainsOnRandomInstances) {
  Rng rng(41);
  for (int t = 0; t < 2000; ++t) {
    auto r = error_bound_report(random_finite_problem(rng, 6));
    for (const auto& c : r.checks) {
      if (!c.applicable || c.name == "bretagnolle-huber") continue;
      EXPECT_TRUE(c.holds) << c.name << ": " << c.lhs << " > " << c.rhs;
    }
  }
}

TEST(BoundReport, GaussianBretagnolleHuber) {
  HypothesisProblem g{Distribution::normal(0, 1), Distribution::normal(3, 1), WeightFunction::constant(1)};
  auto r = error_bound_report(g, {}, 1e-9);
  EXPECT_NEAR(r.kl, 4.5, 1e-10);
  EXPECT_NEAR(r.bretagnolle_huber, std::sqrt(1 - std::exp(-4.5)), 1e-10);
  EXPECT_TRUE(r.check("bretagnolle-huber").holds);
}

TEST(BoundReport, PrintedBretagnolleHuberFailsForLightWeights) {
  // p = q, phi = 1/2: tau = 0, K = 0, Delta = 1/2, so the printed bound asks 1 <= 1/4.
  auto r = error_bound_report(binary({0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}));
  EXPECT_FALSE(r.check("bretagnolle-huber").holds);
  EXPECT_TRUE(r.check("bretagnolle-huber-tilted").holds);
  EXPECT_FALSE(r.check("bretagnolle-huber-when-mass>=1").applicable);
}

TEST(NFold, SingleObservationReduces) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    auto pr = random_finite_problem(rng, 3);
    auto b = nfold_error_bounds({pr, 1});
    ASSERT_TRUE(b.exact);
    EXPECT_NEAR(*b.exact, min_total_error(pr).value, 1e-14);
    for (const auto& c : b.checks) EXPECT_TRUE(c.holds || !c.applicable) << c.name;
  }
}

TEST(NFold, BinaryExampleWithinSandwich) {
  auto pr = binary({0.5, 0.5}, {0.25, 0.75}, {1, 1});
  auto b = nfold_error_bounds({pr, 10});
  ASSERT_TRUE(b.exact);
  EXPECT_EQ(b.exact_method, "product");
  const double rho = std::sqrt(0.125) + std::sqrt(0.375);
  EXPECT_NEAR(b.upper, std::pow(rho, 10), 1e-14);
  EXPECT_GE(*b.exact, std::pow(rho, 20) / 2);
  EXPECT_LE(*b.exact, std::pow(rho, 10));
  ASSERT_TRUE(b.hellinger_bound);
  EXPECT_LE(*b.exact, *b.hellinger_bound);
}

TEST(NFold, ProductAndCompositionRoutesAgree) {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 3);
    const std::size_t n = 1 + t % 9;
    const double a = nfold_min_total_error_product({pr, n});
    const double b = nfold_min_total_error_compositions({pr, n});
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, a));
  }
}

TEST(NFold, LargeProductFallsBackToCompositions) {
  auto b = nfold_error_bounds({kExample, 40});
  EXPECT_EQ(b.exact_method, "compositions");
  EXPECT_THROW(nfold_min_total_error_product({kExample, 40}), Error);
}

TEST(SteinSanov, LimitExamples) {
  auto unit = binary({0.5, 0.5}, {0.25, 0.75}, {1, 1});
  EXPECT_NEAR(stein_sanov_limit(unit), -kl(unit).value, 1e-15);
  auto same = binary({0.2, 0.8}, {0.2, 0.8}, {2, 1});
  EXPECT_NEAR(stein_sanov_limit(same), std::log(1.2), 1e-15);
  // E_phi(p) = 1.5, K = 2*0.5 ln 2 + 0.5 ln(2/3).
  const double k = std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  EXPECT_NEAR(stein_sanov_limit(kExample), std::log(1.5) - k / 1.5, 1e-15);
  EXPECT_THROW(stein_sanov_limit(binary({0.5, 0.5}, {1, 0}, {1, 1})), Error);
}

TEST(SteinSanov, EqualHypotheses) {
  auto same = binary({0.2, 0.8}, {0.2, 0.8}, {2, 1});
  auto e = stein_sanov_empirical({same, 50}, 0.05);
  EXPECT_NEAR(e.rate, std::log(1.2), 1e-13);
  EXPECT_NEAR(e.type1_level, 0.0, 1e-15);
}

TEST(SteinSanov, BinaryExamples) {
  auto unit = binary({0.5, 0.5}, {0.25, 0.75}, {1, 1});
  auto e = stein_sanov_empirical({unit, 100}, 0.05);
  EXPECT_LE(std::abs(e.rate + kl(unit).value), 0.1);
  auto w = stein_sanov_empirical({kExample, 100}, 0.05);
  EXPECT_LE(std::abs(w.rate - stein_sanov_limit(kExample)), 0.1);
}

TEST(SteinSanov, MonteCarloAgreesWithEnumeration) {
  auto ex = stein_sanov_empirical({kExample, 40}, 0.1);
  SteinSanovOptions mc;
  mc.method = SteinSanovMethod::monte_carlo;
  mc.samples = 200000;
  mc.seed = 5;
  auto est = stein_sanov_empirical({kExample, 40}, 0.1, mc);
  EXPECT_NEAR(est.rate, ex.rate, 4 * est.rate_std_error + 1e-12);
}

TEST(SteinSanov, EnumerationCap) {
  Rng rng(4);
  auto pr = random_finite_problem(rng, 6);
  try {
    stein_sanov_empirical({pr, 200}, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::enumeration_too_large);
  }
}

TEST(SteinSanov, ContinuousMonteCarlo) {
  HypothesisProblem g{Distribution::normal(0, 1), Distribution::normal(1, 1), WeightFunction::exponential(0.2)};
  SteinSanovOptions mc;
  mc.method = SteinSanovMethod::monte_carlo;
  mc.samples = 100000;
  auto e = stein_sanov_empirical({g, 20}, 0.3, mc);
  EXPECT_TRUE(std::isfinite(e.rate));
  EXPECT_LT(std::abs(e.rate - stein_sanov_limit(g)), 0.3 + 0.3);
}

TEST(TiltedPair, MeanIdentities) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 5);
    auto tp = make_tilted_pair(pr);
    double mpi = 0, mth = 0;
    for (std::size_t i = 0; i < tp.pi.pmf().size(); ++i) {
      mpi += tp.pi.pmf()[i] * tp.z(double(i));
      mth += tp.theta.pmf()[i] * tp.z(double(i));
    }
    EXPECT_NEAR(mpi, tp.mean_pi, 1e-13);
    EXPECT_NEAR(mth, tp.mean_theta, 1e-13);
  }
  HypothesisProblem g{Distribution::normal(0, 1), Distribution::normal(1, 2), WeightFunction::exponential(0.3)};
  auto tp = make_tilted_pair(g);
  IntegrationConfig cfg;
  auto one = WeightFunction::constant(1);
  auto mass = integrate_single(one, tp.pi, [](double lw, double lp) { return std::exp(lw + lp); }, cfg);
  EXPECT_NEAR(mass.value, 1.0, 1e-10);
  auto mean = integrate_pair_at(one, tp.pi, tp.theta,
                                [&](double x, double lw, double lp, double) { return std::exp(lw + lp) * tp.z(x); }, cfg);
  EXPECT_NEAR(mean.value, tp.mean_pi, 1e-9);
}
