#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "winfer/distribution.hpp"
#include "winfer/error.hpp"
#include "winfer/finite_diff.hpp"
#include "winfer/integrate.hpp"

using namespace winfer;

namespace {

IntegrationConfig cfg;

double normal_pdf(double x, double m, double v) {
  return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2 * std::numbers::pi * v);
}

}  // namespace

TEST(Support, FiniteAlphabetNeedsDistinctLabels) {
  EXPECT_THROW(Support::finite({0, 1}, {"a", "a"}), Error);
  EXPECT_THROW(Support::finite(0), Error);
  EXPECT_THROW(Support::real_vector(0), Error);
  EXPECT_EQ(Support::finite(3).measure(), ReferenceMeasure::counting);
  EXPECT_EQ(Support::real_line().measure(), ReferenceMeasure::lebesgue);
}

TEST(Weight, PolynomialCertificate) {
  // x^2 + b x + c is admitted only when c >= b^2/4.
  EXPECT_NO_THROW(WeightFunction::polynomial({1.0, 2.0, 1.0}, Support::real_line()));
  EXPECT_THROW(WeightFunction::polynomial({0.9, 2.0, 1.0}, Support::real_line()), Error);
  EXPECT_THROW(WeightFunction::polynomial({0.0, 1.0}, Support::real_line()), Error);
  EXPECT_NO_THROW(WeightFunction::polynomial({0.0, 1.0}, Support::half_line(0.0)));
  EXPECT_THROW(WeightFunction::constant(-1.0), Error);
  EXPECT_THROW(WeightFunction::table({1.0, -0.1}), Error);
}

TEST(Weight, TableLengthMustMatchAlphabet) {
  EXPECT_THROW(WeightFunction::table({1, 2, 3}).check_support(Support::finite(2)), Error);
  EXPECT_THROW(WeightFunction::table({1, 2}).check_support(Support::real_line()), Error);
}

TEST(Weight, LaplaceTransformMatchesQuadrature) {
  IntegrationConfig c;
  const double lambda = 1.7;
  for (auto w : {WeightFunction::constant(2.0), WeightFunction::exponential(0.4),
                 WeightFunction::polynomial({1.0, 0.5, 0.25}, Support::half_line(0)),
                 WeightFunction::absolute()}) {
    auto direct = integrate([&](double x) { return w(x) * std::exp(-lambda * x); },
                            Support::half_line(0.0), c, {0, 0, 1.0 / lambda});
    EXPECT_NEAR(*w.laplace(lambda), direct.value, 1e-10) << w.describe();
    auto d = finite_difference([&](double l) { return *w.laplace(l); }, lambda);
    EXPECT_NEAR(*w.laplace_derivative(lambda), d, 1e-7) << w.describe();
  }
  EXPECT_FALSE(WeightFunction::exponential(2.0).laplace(1.5).has_value());
}

TEST(WeightedExpectation, FiniteExamples) {
  auto s = Support::finite(2);
  std::vector<double> pmf{0.3, 0.7};
  auto g = [&](double i) { return pmf[static_cast<std::size_t>(i)]; };
  EXPECT_NEAR(weighted_expectation(WeightFunction::constant(1), g, s, cfg).value, 1.0, 1e-15);
  pmf = {0.5, 0.5};
  EXPECT_NEAR(weighted_expectation(WeightFunction::table({2, 1}), g, s, cfg).value, 1.5, 1e-15);
}

TEST(WeightedExpectation, ExponentialWeightUnderGaussian) {
  for (double theta : {-1.0, 0.0, 2.5})
    for (double sigma2 : {0.5, 1.0, 4.0})
      for (double gamma : {-0.7, 0.3, 1.2}) {
        auto g = [&](double x) { return normal_pdf(x, theta, sigma2); };
        auto r = weighted_expectation(WeightFunction::exponential(gamma), g, Support::real_line(),
                                      cfg, {theta, theta, std::sqrt(sigma2)});
        const double want = std::exp(theta * gamma + sigma2 * gamma * gamma / 2);
        EXPECT_NEAR(r.value / want, 1.0, 1e-10);
      }
}

TEST(WeightedExpectation, UnitWeightOnAnyPmfIsOne) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> w(1 + t % 9);
    for (auto& v : w) v = rng.uniform();
    const double tot = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& v : w) v /= tot;
    auto d = Distribution::finite(w);
    auto r = integrate_single(WeightFunction::constant(1), d,
                              [](double lphi, double lp) { return std::exp(lphi + lp); }, cfg);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
  }
}

TEST(Integrate, Examples) {
  auto r = integrate([](double x) { return normal_pdf(x, 0, 1); }, Support::real_line(), cfg);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
  EXPECT_EQ(r.method, Method::quadrature);
  auto e = integrate([](double x) { return x * 2 * std::exp(-2 * x); }, Support::half_line(0), cfg,
                     {0.5, 0.5, 0.5});
  EXPECT_NEAR(e.value, 0.5, 1e-10);
  auto z = integrate([](double) { return 0.0; }, Support::finite(4), cfg);
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.method, Method::exact_sum);
}

TEST(Integrate, LatticeSeriesMatchesPoissonMoments) {
  auto pois = Distribution::poisson(3.5);
  auto m2 = integrate([&](double k) { return k * k * pois.density(k); }, Support::nonneg_integers(),
                      cfg, {3.5, 3.5, std::sqrt(3.5)});
  EXPECT_NEAR(m2.value, 3.5 + 3.5 * 3.5, 1e-11);
}

TEST(Integrate, IntegrableSingularityAtBoundary) {
  auto r = integrate([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, Support::finite(1),
                     cfg);
  (void)r;
  auto g = integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 4.0, cfg);
  EXPECT_NEAR(g.value, 4.0, 1e-9);
}

TEST(Integrate, HeavyTailIsReportedNotTruncated) {
  auto cauchy = [](double x) { return 1.0 / (std::numbers::pi * (1 + std::abs(x))); };
  EXPECT_THROW(integrate(cauchy, Support::real_line(), cfg), Error);
}

TEST(Integrate, SubdivisionBudgetExhaustion) {
  IntegrationConfig tight;
  tight.max_subdivisions = 3;
  try {
    integrate_interval([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_convergent_integral);
  }
}

TEST(Integrate, ExplicitTruncation) {
  IntegrationConfig c;
  c.lower = -1.0;
  c.upper = 1.0;
  auto r = integrate([](double x) { return x * x; }, Support::real_line(), c);
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-13);
}

TEST(Integrate, ConfigValidation) {
  IntegrationConfig c;
  c.rel_tol = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.mc_samples = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Integrate, HermiteRuleIntegratesPolynomialsExactly) {
  std::vector<double> x, w;
  gauss_hermite(20, x, w);
  double m0 = 0, m4 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) m0 += w[i], m4 += w[i] * std::pow(x[i], 4);
  EXPECT_NEAR(m0, std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(m4, 0.75 * std::sqrt(std::numbers::pi), 1e-12);
}

TEST(Integrate, MultivariateGaussianMass) {
  Mat cov(2, 2);
  cov << 1.0, 0.3, 0.3, 2.0;
  Vec mean(2);
  mean << 0.5, -1.0;
  auto d = Distribution::mvn(mean, cov);
  auto r = integrate_single(WeightFunction::exponential(std::vector<double>{0.2, -0.1}), d,
                            [](double lphi, double lp) { return std::exp(lphi + lp); }, cfg);
  Vec g(2);
  g << 0.2, -0.1;
  const double want = std::exp(g.dot(mean) + 0.5 * g.dot(cov * g));
  EXPECT_NEAR(r.value / want, 1.0, 1e-10);
}

TEST(Integrate, HighDimensionFallsBackToMonteCarlo) {
  Vec mean = Vec::Zero(4);
  Mat cov = Mat::Identity(4, 4);
  auto d = Distribution::mvn(mean, cov);
  auto r = integrate_single(WeightFunction::constant(1), d,
                            [](double lphi, double lp) { return std::exp(lphi + lp); }, cfg);
  EXPECT_EQ(r.method, Method::monte_carlo);
  EXPECT_GT(r.error, 0.0);
  EXPECT_NEAR(r.value, 1.0, 4.0 * r.error);
}

TEST(Integrate, PairRejectsMismatchedSupports) {
  auto p = Distribution::normal(0, 1);
  auto q = Distribution::exponential(1);
  EXPECT_THROW(integrate_pair(WeightFunction::constant(1), p, q,
                              [](double, double, double) { return 0.0; }, cfg),
               Error);
}

TEST(Integrate, PairSignalsInfiniteIntegrand) {
  auto p = Distribution::finite({0.5, 0.5});
  auto q = Distribution::finite({1.0, 0.0});
  auto r = integrate_pair(WeightFunction::constant(1), p, q,
                          [](double lphi, double lp, double lq) {
                            return lq == -INFINITY ? INFINITY : std::exp(lphi + lp) * (lp - lq);
                          },
                          cfg);
  EXPECT_TRUE(std::isinf(r.value));
}

TEST(Sample, Examples) {
  EXPECT_TRUE(sample(Distribution::bernoulli(0.5), 0, 1).empty());
  EXPECT_EQ(sample(Distribution::bernoulli(1.0), 5, 7), std::vector<double>(5, 1.0));
  auto xs = sample(Distribution::normal(0, 1), 100000, 42);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(1e5));
}

TEST(Sample, DeterministicAndSeedSensitive) {
  for (auto d : {Distribution::normal(1, 2), Distribution::exponential(2), Distribution::poisson(3),
                 Distribution::gamma(2.5, 1.5), Distribution::finite({0.2, 0.3, 0.5})}) {
    EXPECT_EQ(sample(d, 16, 9), sample(d, 16, 9));
    EXPECT_NE(sample(d, 16, 9), sample(d, 16, 10));
  }
}

TEST(Sample, MarginalLawOfFiniteDistribution) {
  // Chi-square goodness of fit at 3 degrees of freedom, 99.9% quantile 16.27.
  std::vector<double> pmf{0.1, 0.2, 0.3, 0.4};
  auto xs = sample(Distribution::finite(pmf), 20000, 3);
  std::vector<double> count(4, 0);
  for (double x : xs) count[static_cast<std::size_t>(x)] += 1;
  double chi2 = 0;
  for (int i = 0; i < 4; ++i) chi2 += std::pow(count[i] - 20000 * pmf[i], 2) / (20000 * pmf[i]);
  EXPECT_LT(chi2, 16.27);
}

TEST(Sample, CustomWithoutSamplerFails) {
  auto d = Distribution::custom(Support::real_line(), [](double x) { return -x * x; }, 0, 1);
  try {
    sample(d, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_sampler);
  }
}

TEST(Distribution, Normalization) {
  EXPECT_THROW(Distribution::finite({0.5, 0.6}), Error);
  EXPECT_THROW(Distribution::finite({-0.1, 1.1}), Error);
  for (auto d : {Distribution::normal(1, 2), Distribution::exponential(2),
                 Distribution::gamma(0.7, 1.5), Distribution::gamma(3.0, 0.5)}) {
    auto r = integrate_single(WeightFunction::constant(1), d,
                              [](double lphi, double lp) { return std::exp(lphi + lp); }, cfg);
    EXPECT_NEAR(r.value, 1.0, 1e-9);
  }
  Mat bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(Distribution::mvn(Vec::Zero(2), bad), Error);
}

TEST(McMeans, ThreadCountIndependent) {
  auto draw = [](Rng& r, std::span<double> out) { out[0] = r.normal(); };
  setenv("WINFER_THREADS", "1", 1);
  auto a = mc_means(50000, 11, 1, draw);
  setenv("WINFER_THREADS", "4", 1);
  auto b = mc_means(50000, 11, 1, draw);
  unsetenv("WINFER_THREADS");
  EXPECT_EQ(a.mean[0], b.mean[0]);
  EXPECT_EQ(a.std_error[0], b.std_error[0]);
}

TEST(FiniteDifference, Examples) {
  Vec t(1);
  t << 3.0;
  EXPECT_NEAR(finite_difference_gradient([](const Vec& x) { return x(0) * x(0); }, t)(0), 6.0, 1e-6);
  Vec z(3);
  z << 1, -2, 5;
  EXPECT_EQ(finite_difference_gradient([](const Vec&) { return 4.0; }, z), Vec::Zero(3));
  EXPECT_NEAR(finite_difference([](double l) { return -std::log(l); }, 2.0), -0.5, 1e-6);
}

TEST(FiniteDifference, NonFiniteFieldIsEvaluationFailure) {
  Vec t(1);
  t << 0.0;
  try {
    finite_difference_gradient([](const Vec& x) { return std::log(x(0)); }, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::evaluation_failure);
  }
}

TEST(FiniteDifference, Hessian) {
  Vec t(2);
  t << 0.3, -0.4;
  Mat h = finite_difference_hessian([](const Vec& x) { return x(0) * x(0) * x(1) + 3 * x(1) * x(1); }, t);
  EXPECT_NEAR(h(0, 0), 2 * t(1), 1e-6);
  EXPECT_NEAR(h(0, 1), 2 * t(0), 1e-6);
  EXPECT_NEAR(h(1, 1), 6.0, 1e-6);
}
