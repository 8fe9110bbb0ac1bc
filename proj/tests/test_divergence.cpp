#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "winfer/instances.hpp"
#include "winfer/divergence.hpp"
#include "winfer/error.hpp"

using namespace winfer;
using namespace winfer::instances;

namespace {

HypothesisProblem binary(std::vector<double> p, std::vector<double> q, std::vector<double> w) {
  return {Distribution::finite(std::move(p)), Distribution::finite(std::move(q)),
          WeightFunction::table(std::move(w))};
}

HypothesisProblem gauss(double a, WeightFunction w = WeightFunction::constant(1)) {
  return {Distribution::normal(0, 1), Distribution::normal(a, 1), std::move(w)};
}

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST(WeightedTv, Examples) {
  auto pr = binary({0.5, 0.5}, {0.25, 0.75}, {2, 1});
  EXPECT_NEAR(weighted_tv(pr).value, 0.375, 1e-15);
  EXPECT_NEAR(weighted_tv_sup_oracle(pr), 0.375, 1e-15);
  EXPECT_EQ(weighted_tv(binary({0.3, 0.7}, {0.3, 0.7}, {3, 1})).value, 0.0);
  EXPECT_EQ(weighted_tv_sup_oracle(binary({1, 0}, {0, 1}, {1, 1})), 1.0);
  EXPECT_EQ(weighted_tv_sup_oracle(binary({0.2, 0.8}, {0.2, 0.8}, {1, 5})), 0.0);
}

TEST(WeightedTv, AbsoluteWeightGaussianShiftMatchesDirectQuadrature) {
  // Independent route: integrate |x| |p - q| / 2 split at the crossing a/2.
  for (double a : {0.5, 1.0, 2.0}) {
    auto f = [a](double x) {
      auto n = [](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi); };
      return 0.5 * std::abs(x) * std::abs(n(x) - n(x - a));
    };
    double direct = integrate_interval(f, -40, 0, {}).value + integrate_interval(f, 0, a / 2, {}).value +
                    integrate_interval(f, a / 2, 40, {}).value;
    EXPECT_NEAR(weighted_tv(gauss(a, WeightFunction::absolute())).value, direct, 1e-10);
  }
}

TEST(WeightedTv, OracleEquivalenceOnRandomInstances) {
  Rng rng(101);
  for (int t = 0; t < 300; ++t) {
    auto pr = random_finite_problem(rng, 1 + t % 12);
    EXPECT_NEAR(weighted_tv(pr).value, weighted_tv_sup_oracle(pr), 1e-12);
  }
}

TEST(WeightedTv, OracleRejectsLargeAlphabet) {
  Rng rng(1);
  auto pr = random_finite_problem(rng, 21);
  try {
    weighted_tv_sup_oracle(pr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::alphabet_too_large);
  }
}

TEST(WeightedTv, MetricAxioms) {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 2 + t % 7;
    auto w = WeightFunction::table(log_uniform_weights(rng, m));
    auto p = Distribution::finite(dirichlet(rng, m));
    auto q = Distribution::finite(dirichlet(rng, m));
    auto r = Distribution::finite(dirichlet(rng, m));
    const double pq = weighted_tv({p, q, w}).value;
    EXPECT_EQ(pq, weighted_tv({q, p, w}).value);
    EXPECT_LE(pq, weighted_tv({p, r, w}).value + weighted_tv({r, q, w}).value + 1e-15);
    EXPECT_GT(pq, 0.0);
    EXPECT_EQ(weighted_tv({p, p, w}).value, 0.0);
  }
}

TEST(Delta, Examples) {
  EXPECT_NEAR(delta(binary({0.5, 0.5}, {0.25, 0.75}, {2, 1})).value, 1.375, 1e-15);
  EXPECT_NEAR(delta(gauss(1.3)).value, 1.0, 1e-10);
  for (double g : {-1.0, 0.5, 2.0})
    EXPECT_NEAR(delta(gauss(0.0, WeightFunction::exponential(g))).value, std::exp(g * g / 2),
                1e-10 * std::exp(g * g / 2));
}

TEST(Hellinger, Examples) {
  EXPECT_EQ(hellinger(binary({0.4, 0.6}, {0.4, 0.6}, {1, 2})).value, 0.0);
  EXPECT_NEAR(hellinger(binary({1, 0}, {0, 1}, {1, 1})).value, 1.0, 1e-15);
  const double hand = std::sqrt(0.5 * (2 * std::pow(std::sqrt(.5) - std::sqrt(.25), 2) +
                                       std::pow(std::sqrt(.5) - std::sqrt(.75), 2)));
  EXPECT_NEAR(hellinger(binary({0.5, 0.5}, {0.25, 0.75}, {2, 1})).value, hand, 1e-15);
}

TEST(Bhattacharyya, Examples) {
  EXPECT_NEAR(bhattacharyya_coeff(gauss(0)).value, 1.0, 1e-10);
  EXPECT_EQ(bhattacharyya_coeff(binary({1, 0}, {0, 1}, {1, 1})).value, 0.0);
  for (double a : {0.0, 0.5, 1.0, 2.0, 4.0})
    EXPECT_NEAR(bhattacharyya_coeff(gauss(a)).value, std::exp(-a * a / 8), 1e-10);
  EXPECT_TRUE(bhattacharyya_div(binary({1, 0}, {0, 1}, {1, 1})).infinite());
  EXPECT_NEAR(bhattacharyya_div(gauss(0)).value, 0.0, 1e-10);
}

TEST(Kl, Examples) {
  EXPECT_NEAR(kl(gauss(0)).value, 0.0, 1e-12);
  EXPECT_TRUE(kl(binary({0.5, 0.5}, {1.0, 0.0}, {1, 1})).infinite());
  EXPECT_FALSE(kl(binary({1.0, 0.0}, {0.5, 0.5}, {1, 1})).infinite());
  // phi-hat(lambda) = 1/(lambda - gamma), derivative -1/(lambda - gamma)^2.
  for (double gamma : {-0.5, 0.0, 0.7}) {
    const double l = 2.0, l2 = 3.0;
    const double hat = 1 / (l - gamma), dhat = -hat * hat;
    const double want = l * (std::log(l) - std::log(l2)) * hat - l * (l2 - l) * dhat;
    HypothesisProblem pr{Distribution::exponential(l), Distribution::exponential(l2),
                         WeightFunction::exponential(gamma)};
    EXPECT_NEAR(kl(pr).value, want, 1e-10 * std::abs(want));
  }
}

TEST(Kl, UnweightedGaussianReduction) {
  for (double a : {0.3, 1.0, 3.0}) {
    EXPECT_NEAR(kl(gauss(a)).value, a * a / 2, 1e-10);
    EXPECT_NEAR(weighted_tv(gauss(a)).value, 2 * Phi(a / 2) - 1, 1e-10);
    EXPECT_NEAR(std::pow(hellinger(gauss(a)).value, 2), 1 - std::exp(-a * a / 8), 1e-10);
  }
}

TEST(Chernoff, Identities) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 6);
    EXPECT_NEAR(chernoff_coeff({pr.p, pr.p, pr.phi}, 0.3).value, 1.0, 1e-14);
    const double mass = weighted_mass(pr.phi, pr.p).value;
    EXPECT_NEAR(chernoff_coeff(pr, 0.5).value, bhattacharyya_coeff(pr).value / mass, 1e-13);
    EXPECT_NEAR(chernoff_div(pr, 0.5).value, bhattacharyya_div(pr).value, 1e-12);
    for (double a : {0.2, 0.7}) {
      EXPECT_EQ(chernoff_div({pr.p, pr.p, pr.phi}, a).value, 0.0);
      EXPECT_EQ(renyi_div({pr.p, pr.p, pr.phi}, a).value, 0.0);
      EXPECT_EQ(tsallis_div({pr.p, pr.p, pr.phi}, a).value, 0.0);
    }
  }
  EXPECT_THROW(chernoff_coeff(random_finite_problem(rng, 3), 1.2), Error);
  EXPECT_THROW(chernoff_coeff(random_finite_problem(rng, 3), 0.0), Error);
}

TEST(Chernoff, ZeroWeightMass) {
  auto pr = binary({1, 0}, {0.5, 0.5}, {0, 1});
  try {
    chernoff_coeff(pr, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::zero_weight_mass);
  }
}

TEST(RenyiTsallis, ConvergeToKlAsAlphaTendsToOne) {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 8);
    const double k = kl(pr).value;
    EXPECT_NEAR(renyi_div(pr, 0.999).value, k, 1e-2);
    double prev_r = INFINITY, prev_t = INFINITY;
    for (int e = 2; e <= 6; ++e) {
      const double a = 1 - std::pow(10.0, -e);
      const double r = std::abs(renyi_div(pr, a).value - k);
      const double ts = std::abs(tsallis_div(pr, a).value - k);
      EXPECT_LE(r, prev_r + 1e-12);
      EXPECT_LE(ts, prev_t + 1e-12);
      EXPECT_LE(r, 50 * std::pow(10.0, -e) * (1 + k * k));
      prev_r = r;
      prev_t = ts;
    }
  }
}

TEST(RenyiTsallis, PrintedConventionHasOppositeSign) {
  Rng rng(13);
  auto pr = random_finite_problem(rng, 5);
  EXPECT_EQ(renyi_div(pr, 0.4, {}, Convention::as_printed).value, -renyi_div(pr, 0.4).value);
  EXPECT_EQ(tsallis_div(pr, 0.4, {}, Convention::as_printed).value, -tsallis_div(pr, 0.4).value);
  EXPECT_EQ(renyi_div(pr, 1.0).value, kl(pr).value);
}

TEST(Entropy, Examples) {
  for (std::size_t m : {1u, 2u, 5u, 16u}) {
    auto u = Distribution::finite(std::vector<double>(m, 1.0 / m));
    EXPECT_NEAR(shannon_entropy(u, WeightFunction::constant(1)).value, std::log(double(m)), 1e-14);
    for (double a : {0.2, 0.5, 0.9})
      EXPECT_NEAR(renyi_entropy(u, WeightFunction::constant(1), a).value, std::log(double(m)), 1e-13);
  }
  auto deg = Distribution::finite({1, 0, 0});
  EXPECT_EQ(shannon_entropy(deg, WeightFunction::table({3, 2, 7})).value, 0.0);
  for (double s2 : {0.5, 2.0})
    EXPECT_NEAR(shannon_entropy(Distribution::normal(1, s2), WeightFunction::constant(1)).value,
                0.5 * std::log(2 * std::numbers::pi * std::numbers::e * s2), 1e-10);
}

TEST(Entropy, ExtendedReducesAtUnitBeta) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 6);
    EXPECT_EQ(renyi_entropy_ext(pr.p, pr.phi, 0.4, 1.0).value, renyi_entropy(pr.p, pr.phi, 0.4).value);
  }
  auto p = Distribution::normal(0, 1);
  EXPECT_NEAR(renyi_entropy_ext(p, WeightFunction::exponential(0.3), 0.6, 1.0).value,
              renyi_entropy(p, WeightFunction::exponential(0.3), 0.6).value, 1e-12);
  EXPECT_THROW(renyi_entropy_ext(p, WeightFunction::constant(1), 0.3, 0.5), Error);
}

TEST(Entropy, RenyiTendsToShannon) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 6);
    EXPECT_NEAR(renyi_entropy(pr.p, pr.phi, 1 - 1e-6).value, shannon_entropy(pr.p, pr.phi).value, 1e-5);
  }
}

TEST(Properties, IdentityAndInequalityChainFinite) {
  Rng rng(21);
  int gibbs_checked = 0;
  for (int t = 0; t < 500; ++t) {
    auto pr = random_finite_problem(rng, 2 + t % 10);
    const double D = delta(pr).value, rho = bhattacharyya_coeff(pr).value;
    const double eta = hellinger(pr).value, tau = weighted_tv(pr).value;
    EXPECT_NEAR(rho, D - eta * eta, 1e-13);
    EXPECT_GE(D - rho, -1e-14);
    EXPECT_LE(D - rho, tau + 1e-14);
    EXPECT_LE(tau, std::sqrt(D * D - rho * rho) + 1e-14);
    const double ep = weighted_mass(pr.phi, pr.p).value, eq = weighted_mass(pr.phi, pr.q).value;
    if (ep >= eq) {
      ++gibbs_checked;
      const double k = kl(pr).value;
      EXPECT_GE(k, -1e-14);
      EXPECT_LE(tau, std::sqrt(k / 2) * std::sqrt(ep) + 1e-14);
    }
  }
  EXPECT_GT(gibbs_checked, 100);
}

TEST(Properties, GibbsEqualityCase) {
  // phi p = phi q: same pmf, kl = 0 exactly.
  auto pr = binary({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}, {1, 4, 2});
  EXPECT_EQ(kl(pr).value, 0.0);
}

TEST(Properties, InequalityChainContinuous) {
  Rng rng(22);
  for (int t = 0; t < 30; ++t) {
    auto pr = random_continuous_problem(rng, t);
    const double D = delta(pr).value, rho = bhattacharyya_coeff(pr).value;
    const double eta = hellinger(pr).value, tau = weighted_tv(pr).value;
    EXPECT_NEAR(rho, D - eta * eta, 1e-9 * D);
    EXPECT_LE(D - rho, tau + 1e-9);
    EXPECT_LE(tau, std::sqrt(D * D - rho * rho) + 1e-9);
  }
}
