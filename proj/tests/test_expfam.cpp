#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numbers>

#include "winfer/catalog.hpp"
#include "winfer/error.hpp"
#include "winfer/expfam.hpp"
#include "winfer/finite_diff.hpp"
#include "winfer/gaussian_tv.hpp"
#include "winfer/instances.hpp"

using namespace winfer;
using namespace winfer::instances;
namespace cf = winfer::closed_form;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

HypothesisProblem pair_of(const ExpfamDraw& d) {
  return {d.family.member(d.theta), d.family.member(d.theta2), d.phi};
}

// Gaussian TV by splitting at the kinks of |x| and the crossing a/2.
double tv_quadrature(double a, const WeightFunction& w) {
  auto n = [](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi); };
  auto f = [&](double x) { return 0.5 * w(x) * std::abs(n(x) - n(x - a)); };
  IntegrationConfig cfg;
  cfg.rel_tol = 1e-13;
  double lo = std::min(0.0, a / 2), hi = std::max(0.0, a / 2);
  return integrate_interval(f, -60, lo, cfg).value + integrate_interval(f, lo, hi, cfg).value +
         integrate_interval(f, hi, 60, cfg).value;
}

}  // namespace

TEST(Catalog, LogNormalizerExamples) {
  auto g = catalog_family("gaussian-scalar");
  EXPECT_NEAR(g.log_normalizer(g.natural(Distribution::normal(0, 1))), 0.5 * std::log(2 * std::numbers::pi),
              1e-15);
  auto p = catalog_family("poisson");
  EXPECT_NEAR(p.log_normalizer(Vec::Constant(1, 0.0)), 1.0, 1e-15);
  auto e = catalog_family("exponential");
  EXPECT_NEAR(weighted_mass(WeightFunction(), e.member(Vec::Constant(1, 2.0))).value, 1.0, 1e-12);
  auto gm = catalog_family("gamma");
  Vec t = gm.natural(Distribution::gamma(3.0, 2.0));
  EXPECT_DOUBLE_EQ(t(0), -2.0);
  EXPECT_DOUBLE_EQ(t(1), 2.0);
  EXPECT_NEAR(gm.log_normalizer(t), std::lgamma(3.0) - 3.0 * std::log(2.0), 1e-14);
  EXPECT_THROW(catalog_family("cauchy"), Error);
}

TEST(Catalog, DensitiesIntegrateToOneAndMatchFactories) {
  Rng rng(5);
  for (int k = 0; k < 25; ++k) {
    auto d = random_expfam_draw(rng, k);
    auto member = d.family.member(d.theta);
    EXPECT_NEAR(weighted_mass(WeightFunction(), member).value, 1.0, 1e-9) << d.family.name();
    std::vector<double> x(d.family.data_dim(), 2.0);
    EXPECT_NEAR(d.family.log_density(x, d.theta), member.log_density(std::span<const double>(x)), 1e-10);
  }
}

TEST(Catalog, NaturalRoundTrip) {
  auto fam = ExponentialFamily::gaussian_multivariate(3);
  Mat cov{{2.0, 0.3, 0.1}, {0.3, 1.0, -0.2}, {0.1, -0.2, 1.5}};
  Vec mean{{0.5, -1.0, 2.0}};
  auto back = fam.member(fam.natural(Distribution::mvn(mean, cov)));
  EXPECT_TRUE(back.tag()->mean.isApprox(mean, 1e-12));
  EXPECT_TRUE(back.tag()->cov.isApprox(cov, 1e-12));
  EXPECT_THROW(fam.natural(Distribution::normal(0, 1)), Error);
  EXPECT_THROW(ExponentialFamily::gamma().member(Vec{{1.0, 0.0}}), Error);
}

TEST(Catalog, GradientsMatchFiniteDifferences) {
  Rng rng(17);
  for (int k = 0; k < 30; ++k) {
    auto d = random_expfam_draw(rng, k);
    const auto& fam = d.family;
    Vec g = fam.log_normalizer_gradient(d.theta);
    Vec fd = finite_difference_gradient([&](const Vec& t) { return fam.log_normalizer(t); }, d.theta, 1e-6);
    for (Eigen::Index i = 0; i < g.size(); ++i) EXPECT_LE(rel(fd(i), g(i)), 1e-5) << fam.name();

    AdjointFamily adj(fam, d.phi);
    if (!adj.closed_form()) continue;
    Vec gs = adj.log_normalizer_gradient(d.theta);
    Vec fds = finite_difference_gradient([&](const Vec& t) { return adj.log_normalizer(t); }, d.theta, 1e-6);
    for (Eigen::Index i = 0; i < gs.size(); ++i) EXPECT_LE(rel(fds(i), gs(i)), 1e-5) << fam.name();
  }
}

TEST(Adjoint, MassMatchesIndependentQuadrature) {
  Rng rng(23);
  for (int k = 0; k < 30; ++k) {
    auto d = random_expfam_draw(rng, k);
    AdjointFamily adj(d.family, d.phi);
    const double closed = std::exp(adj.log_normalizer(d.theta) - d.family.log_normalizer(d.theta));
    const double quad = weighted_mass(d.phi, d.family.member(d.theta)).value;
    EXPECT_LE(rel(closed, quad), 1e-9) << d.family.name() << " " << d.phi.describe();
  }
}

TEST(Adjoint, CarrierAddsLogWeight) {
  AdjointFamily adj(ExponentialFamily::poisson(), WeightFunction::exponential(0.3));
  EXPECT_NEAR(adj.carrier(4.0), -std::lgamma(5.0) + 1.2, 1e-14);
}

TEST(Adjoint, IncompatibleWeightIsRejected) {
  AdjointFamily adj(ExponentialFamily::exponential(), WeightFunction::exponential(2.0));
  EXPECT_FALSE(adj.compatible(Vec::Constant(1, 1.5)));
  EXPECT_TRUE(adj.compatible(Vec::Constant(1, 2.5)));
  try {
    adj.mass(Vec::Constant(1, 1.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parameter_out_of_domain);
  }
}

TEST(Adjoint, CoefficientExamples) {
  AdjointFamily g(ExponentialFamily::gaussian_scalar(), WeightFunction::exponential(0.4));
  const double mu = 0.3, s2 = 1.7;
  auto c = adjoint_coefficients(g, Vec{{mu / s2, -0.5 / s2}});
  EXPECT_NEAR(c.e1(0), (0.4 * s2 + mu) * c.e0, 1e-13);
  EXPECT_NEAR(c.e2(0, 0), (s2 + std::pow(0.4 * s2 + mu, 2)) * c.e0, 1e-12);

  AdjointFamily unit(ExponentialFamily::gaussian_scalar(), WeightFunction());
  auto u = adjoint_coefficients(unit, Vec{{mu / s2, -0.5 / s2}});
  EXPECT_DOUBLE_EQ(u.e0, 1.0);
  EXPECT_NEAR(u.e1(0), mu, 1e-14);
  EXPECT_NEAR(u.e2(0, 0), s2 + mu * mu, 1e-14);

  AdjointFamily gm(ExponentialFamily::gamma(), WeightFunction());
  auto l = adjoint_coefficients(gm, Vec{{-1.0, 1.0}});
  EXPECT_NEAR(*l.gamma_l, 2.0 - boost::math::digamma(2.0), 1e-13);
  // Same through quadrature of the defining integral.
  auto p = Distribution::gamma(2, 1);
  double quad = integrate_pair_at(
                    WeightFunction(), p, p,
                    [](double x, double, double lp, double) { return (x - std::log(x)) * std::exp(lp); }, {})
                    .value;
  EXPECT_NEAR(*l.gamma_l, quad, 1e-10);

  // Polynomial weight on the Gaussian goes through quadrature.
  AdjointFamily gq(ExponentialFamily::gaussian_scalar(),
                   WeightFunction::polynomial({1.0, 0.0, 1.0}, Support::real_line()));
  auto q = adjoint_coefficients(gq, Vec{{0.0, -0.5}});
  EXPECT_NEAR(q.e0, 2.0, 1e-10);
  EXPECT_NEAR(q.e2(0, 0), 4.0, 1e-9);  // E[x^2 + x^4]

  AdjointFamily ex(ExponentialFamily::exponential(), WeightFunction::exponential(0.5));
  auto cx = adjoint_coefficients(ex, Vec::Constant(1, 2.0));
  EXPECT_NEAR(*cx.laplace, 1.0 / 1.5, 1e-15);
  EXPECT_NEAR(*cx.laplace_derivative, -1.0 / 2.25, 1e-15);
}

TEST(Bregman, Examples) {
  ConvexFn sq = [](const Vec& t) { return t.squaredNorm(); };
  GradientFn dsq = [](const Vec& t) { return Vec(2 * t); };
  EXPECT_DOUBLE_EQ(bregman(sq, dsq, Vec::Constant(1, 1.0), Vec::Constant(1, 0.0)), 1.0);
  auto e = ExponentialFamily::exponential();
  EXPECT_DOUBLE_EQ(bregman(e, Vec::Constant(1, 1.0), Vec::Constant(1, 1.0)), 0.0);
  // Exp(1) against Exp(2): ln 2 - ... by quadrature of the unweighted KL.
  const double b = bregman(e, Vec::Constant(1, 2.0), Vec::Constant(1, 1.0));
  const double k = kl({Distribution::exponential(1), Distribution::exponential(2), WeightFunction()}).value;
  EXPECT_NEAR(b, k, 1e-10);
  EXPECT_NEAR(b, 1.0 - std::log(2.0), 1e-15);
}

TEST(Bregman, WeightedPoissonMatchesSeriesForm) {
  AdjointFamily adj(ExponentialFamily::poisson(), WeightFunction::exponential(0.3));
  const double b = weighted_bregman(adj, Vec::Constant(1, std::log(2.0)), Vec::Constant(1, 0.0));
  EXPECT_NEAR(b, cf::poisson_kl(1.0, 2.0, 0.3), 1e-13);
  EXPECT_NEAR(b, std::exp(std::expm1(0.3)) * (1.0 + std::exp(0.3) * std::log(0.5)), 1e-13);
}

TEST(Bregman, WeightedEqualsKlOnRandomDraws) {
  Rng rng(3);
  for (int k = 0; k < 60; ++k) {
    auto d = random_expfam_draw(rng, k);
    AdjointFamily adj(d.family, d.phi);
    const double b = weighted_bregman(adj, d.theta2, d.theta);
    const double q = kl(pair_of(d)).value;
    EXPECT_LE(std::abs(b - q) / std::max(1e-3, std::abs(q)), 1e-8)
        << d.family.name() << " " << d.phi.describe() << " " << b << " vs " << q;
    EXPECT_NEAR(weighted_bregman(adj, d.theta, d.theta), 0.0, 1e-12);
  }
}

TEST(Entropies, MatchDivergenceModule) {
  Rng rng(8);
  for (int k = 0; k < 40; ++k) {
    auto d = random_expfam_draw(rng, k);
    AdjointFamily adj(d.family, d.phi);
    auto p = d.family.member(d.theta);
    SCOPED_TRACE(d.family.name() + " " + d.phi.describe());
    EXPECT_LE(rel(expfam_shannon(adj, d.theta), shannon_entropy(p, d.phi).value), 1e-8)
        << d.family.name() << " " << d.phi.describe();
    for (double alpha : {0.3, 0.8}) {
      if (!adj.compatible(alpha * d.theta)) continue;
      EXPECT_LE(rel(expfam_renyi(adj, d.theta, alpha), renyi_entropy(p, d.phi, alpha).value), 1e-8)
          << d.family.name() << " " << d.phi.describe();
    }
  }
}

TEST(Entropies, ClassicalGaussianAndRenyiLimit) {
  AdjointFamily unit(ExponentialFamily::gaussian_scalar(), WeightFunction());
  const double s2 = 2.5;
  Vec t{{0.2 / s2, -0.5 / s2}};
  EXPECT_NEAR(expfam_shannon(unit, t), 0.5 * std::log(2 * std::numbers::pi * std::numbers::e * s2), 1e-13);
  AdjointFamily w(ExponentialFamily::gaussian_scalar(), WeightFunction::exponential(0.3));
  EXPECT_NEAR(expfam_renyi(w, t, 1 - 1e-6), expfam_shannon(w, t), 1e-4);
  AdjointFamily pw(ExponentialFamily::poisson(), WeightFunction::exponential(0.3));
  EXPECT_NEAR(expfam_renyi(pw, Vec::Constant(1, 0.4), 1 - 1e-6), expfam_shannon(pw, Vec::Constant(1, 0.4)),
              1e-4);
}

TEST(Entropies, ExponentialFamilyShannonMatchesLaplaceForm) {
  for (auto w : {WeightFunction::exponential(0.5), WeightFunction::absolute(),
                 WeightFunction::polynomial({0.3, 1.0, 0.5}, Support::half_line(0))}) {
    AdjointFamily adj(ExponentialFamily::exponential(), w);
    const double lam = 1.7;
    const double expected = -lam * (std::log(lam) * *w.laplace(lam) + lam * *w.laplace_derivative(lam));
    EXPECT_NEAR(expfam_shannon(adj, Vec::Constant(1, lam)), expected, 1e-13);
  }
}

TEST(BurbeaRao, SymmetryAndChernoff) {
  Rng rng(41);
  for (int k = 0; k < 40; ++k) {
    auto d = random_expfam_draw(rng, k);
    const double a = 0.1 + 0.8 * rng.uniform();
    const double u = burbea_rao(d.family, d.theta, d.theta2, a);
    EXPECT_GE(u, -1e-14);
    EXPECT_NEAR(u, burbea_rao(d.family, d.theta2, d.theta, 1 - a), 1e-13 * std::max(1.0, std::abs(u)));
    AdjointFamily adj(d.family, d.phi);
    const double c = expfam_chernoff(adj, d.theta, d.theta2, a);
    const double q = chernoff_div(pair_of(d), a).value;
    EXPECT_LE(std::abs(c - q) / std::max(1e-3, std::abs(q)), 1e-8) << d.family.name() << " " << d.phi.describe();
    EXPECT_NEAR(expfam_chernoff(adj, d.theta, d.theta, a), 0.0, 1e-12);
  }
}

// Each closed form against the divergence module at five parameter points.
TEST(ClosedForms, ExponentialGrid) {
  for (auto w : {WeightFunction::exponential(0.3), WeightFunction::absolute(),
                 WeightFunction::polynomial({0.5, 1.0}, Support::half_line(0))}) {
    for (auto [l, l2] : std::vector<std::pair<double, double>>{{0.8, 1.5}, {1, 2}, {2, 3}, {1.5, 0.9}, {3, 1.2}}) {
      HypothesisProblem pr{Distribution::exponential(l), Distribution::exponential(l2), w};
      EXPECT_LE(rel(cf::exponential_kl(l, l2, w), kl(pr).value), 1e-7);
      EXPECT_LE(rel(cf::exponential_shannon(l, w), shannon_entropy(pr.p, w).value), 1e-7);
      EXPECT_LE(rel(cf::exponential_renyi(l, 0.7, w), renyi_entropy(pr.p, w, 0.7).value), 1e-7);
      EXPECT_LE(rel(cf::exponential_chernoff(l, l2, 0.3, w), chernoff_div(pr, 0.3).value), 1e-7);
      EXPECT_LE(rel(cf::exponential_bhattacharyya(l, l2, w), bhattacharyya_div(pr).value), 1e-7);
    }
  }
}

TEST(ClosedForms, PoissonGrid) {
  for (auto [l, l2, g] : std::vector<std::tuple<double, double, double>>{
           {1, 2, 0.3}, {0.5, 1.5, -0.4}, {3, 2, 0.1}, {5, 7, -0.2}, {2, 0.7, 0.5}}) {
    auto w = WeightFunction::exponential(g);
    HypothesisProblem pr{Distribution::poisson(l), Distribution::poisson(l2), w};
    EXPECT_LE(rel(cf::poisson_mass(l, g), weighted_mass(w, pr.p).value), 1e-7);
    EXPECT_LE(rel(cf::poisson_kl(l, l2, g), kl(pr).value), 1e-7);
    EXPECT_LE(rel(cf::poisson_shannon(l, g), shannon_entropy(pr.p, w).value), 1e-7);
    EXPECT_LE(rel(cf::poisson_renyi(l, 0.6, g), renyi_entropy(pr.p, w, 0.6).value), 1e-7);
    EXPECT_LE(rel(cf::poisson_chernoff(l, l2, 0.4, g), chernoff_div(pr, 0.4).value), 1e-7);
    EXPECT_LE(rel(cf::poisson_bhattacharyya(l, l2, g), bhattacharyya_div(pr).value), 1e-7);
    EXPECT_GT(rel(cf::poisson_renyi(l, 0.6, g, Convention::as_printed), renyi_entropy(pr.p, w, 0.6).value), 1e-3);
  }
}

TEST(ClosedForms, ScalarGaussianGrid) {
  const std::vector<std::tuple<double, double, double, double>> grid{
      {0, 1, 1, 2}, {0.5, 0.7, -0.3, 1.2}, {-1, 2, 0, 0.5}, {1, 1.5, 2, 1.5}, {0.2, 0.4, 0.1, 0.9}};
  for (auto w : {WeightFunction::exponential(0.4), WeightFunction::exponential(-0.7), WeightFunction::absolute(),
                 WeightFunction::polynomial({1.0, 0.5, 1.0}, Support::real_line())}) {
    for (auto [m, s, m2, s2] : grid) {
      HypothesisProblem pr{Distribution::normal(m, s), Distribution::normal(m2, s2), w};
      EXPECT_LE(rel(cf::gaussian_kl(m, s, m2, s2, w), kl(pr).value), 1e-7);
      EXPECT_LE(rel(cf::gaussian_shannon(m, s, w), shannon_entropy(pr.p, w).value), 1e-7);
      EXPECT_LE(rel(cf::gaussian_renyi(m, s, 0.6, w), renyi_entropy(pr.p, w, 0.6).value), 1e-7);
      EXPECT_LE(rel(cf::gaussian_chernoff(m, s, m2, s2, 0.3, w), chernoff_div(pr, 0.3).value), 1e-7);
      EXPECT_LE(rel(cf::gaussian_bhattacharyya(m, s, m2, s2, w), bhattacharyya_div(pr).value), 1e-7);
    }
  }
  for (auto [m, s, m2, s2] : grid) {
    const double g = 0.4;
    auto w = WeightFunction::exponential(g);
    HypothesisProblem pr{Distribution::normal(m, s), Distribution::normal(m2, s2), w};
    EXPECT_LE(rel(cf::gaussian_exp_mass(m, s, g), weighted_mass(w, pr.p).value), 1e-7);
    EXPECT_LE(rel(cf::gaussian_exp_kl(m, s, m2, s2, g), kl(pr).value), 1e-7);
    EXPECT_LE(rel(cf::gaussian_exp_shannon(m, s, g), shannon_entropy(pr.p, w).value), 1e-7);
    EXPECT_LE(rel(cf::gaussian_exp_renyi(m, s, 0.6, g), renyi_entropy(pr.p, w, 0.6).value), 1e-7);
    // The printed weight mass carries gamma^2 s2 without the 1/2.
    EXPECT_GT(rel(cf::gaussian_exp_shannon(m, s, g, Convention::as_printed), shannon_entropy(pr.p, w).value),
              1e-3);
  }
}

TEST(ClosedForms, PrintedGaussianChernoffSignsDiffer) {
  auto w = WeightFunction::exponential(0.5);
  HypothesisProblem pr{Distribution::normal(0, 1), Distribution::normal(1, 2), w};
  const double truth = chernoff_div(pr, 0.3).value;
  EXPECT_GT(std::abs(cf::gaussian_chernoff(0, 1, 1, 2, 0.3, w, Convention::as_printed) - truth), 1e-3);
  EXPECT_GT(std::abs(cf::gaussian_bhattacharyya(0, 1, 1, 2, w, Convention::as_printed) -
                     bhattacharyya_div(pr).value),
            1e-3);
  // With phi = 1 the weight terms vanish and the printed forms are exact.
  HypothesisProblem unit{Distribution::normal(0, 1), Distribution::normal(1, 2), WeightFunction()};
  EXPECT_NEAR(cf::gaussian_chernoff(0, 1, 1, 2, 0.3, WeightFunction(), Convention::as_printed),
              chernoff_div(unit, 0.3).value, 1e-9);
}

TEST(ClosedForms, MultivariateGaussianGrid) {
  for (int d : {2, 3}) {
    Rng rng(100 + d);
    for (int k = 0; k < 5; ++k) {
      auto draw = [&] {
        Mat a = Mat::Identity(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j <= i; ++j) a(i, j) = (i == j ? 0.8 + 0.6 * rng.uniform() : 0.3 * (rng.uniform() - 0.5));
        Vec m(d);
        for (int i = 0; i < d; ++i) m(i) = rng.uniform() - 0.5;
        return std::pair<Vec, Mat>{m, a * a.transpose()};
      };
      auto [m, s] = draw();
      auto [m2, s2] = draw();
      Vec g(d);
      for (int i = 0; i < d; ++i) g(i) = 0.5 * (rng.uniform() - 0.5);
      auto w = WeightFunction::exponential(std::vector<double>(g.data(), g.data() + d));
      HypothesisProblem pr{Distribution::mvn(m, s), Distribution::mvn(m2, s2), w};
      const double k_q = kl(pr).value;
      EXPECT_LE(rel(cf::mvn_kl(m, s, m2, s2, w), k_q), 1e-7);
      EXPECT_LE(rel(cf::mvn_exp_kl(m, s, m2, s2, g), k_q), 1e-7);
      const double h_q = shannon_entropy(pr.p, w).value;
      EXPECT_LE(rel(cf::mvn_shannon(m, s, w), h_q), 1e-7);
      EXPECT_LE(rel(cf::mvn_exp_shannon(m, s, g), h_q), 1e-7);
      const double r_q = renyi_entropy(pr.p, w, 0.6).value;
      EXPECT_LE(rel(cf::mvn_renyi(m, s, 0.6, w), r_q), 1e-7);
      EXPECT_LE(rel(cf::mvn_exp_renyi(m, s, 0.6, g), r_q), 1e-7);
      EXPECT_LE(rel(cf::mvn_chernoff(m, s, m2, s2, 0.3, w), chernoff_div(pr, 0.3).value), 1e-7);
      EXPECT_LE(rel(cf::mvn_bhattacharyya(m, s, m2, s2, w), bhattacharyya_div(pr).value), 1e-7);
      EXPECT_LE(rel(cf::mvn_exp_mass(m, s, g), weighted_mass(w, pr.p).value), 1e-7);
      EXPECT_GT(rel(cf::mvn_renyi(m, s, 0.6, w, Convention::as_printed), r_q), 1e-3);
    }
  }
}

TEST(ClosedForms, GammaGrid) {
  const std::vector<std::tuple<double, double, double, double>> grid{
      {2, 1, 3, 1.5}, {1.5, 0.8, 1.2, 1.1}, {3, 2, 2.5, 1}, {0.8, 1, 1.6, 0.7}, {4, 1.5, 3, 2}};
  for (auto w : {WeightFunction(), WeightFunction::exponential(0.3),
                 WeightFunction::polynomial({0.5, 1.0}, Support::half_line(0))}) {
    for (auto [l, b, l2, b2] : grid) {
      HypothesisProblem pr{Distribution::gamma(l, b), Distribution::gamma(l2, b2), w};
      EXPECT_LE(rel(cf::gamma_kl(l, b, l2, b2, w), kl(pr).value), 1e-7);
      EXPECT_LE(rel(cf::gamma_shannon(l, b, w), shannon_entropy(pr.p, w).value), 1e-7);
      EXPECT_LE(rel(cf::gamma_renyi(l, b, 0.6, w), renyi_entropy(pr.p, w, 0.6).value), 1e-7);
      EXPECT_LE(rel(cf::gamma_chernoff(l, b, l2, b2, 0.3, w), chernoff_div(pr, 0.3).value), 1e-7);
      EXPECT_LE(rel(cf::gamma_bhattacharyya(l, b, l2, b2, w), bhattacharyya_div(pr).value), 1e-7);
    }
  }
  HypothesisProblem pr{Distribution::gamma(2, 1), Distribution::gamma(3, 1.5), WeightFunction()};
  EXPECT_GT(rel(cf::gamma_kl(2, 1, 3, 1.5, WeightFunction(), Convention::as_printed), kl(pr).value), 1e-3);
  EXPECT_GT(rel(cf::gamma_renyi(2, 1, 0.6, WeightFunction(), Convention::as_printed),
                renyi_entropy(pr.p, WeightFunction(), 0.6).value),
            1e-3);
}

TEST(GaussianTv, ZeroShiftGivesZero) {
  for (auto w : {GaussianTvWeight::poly(0.5, 1), GaussianTvWeight::absolute(), GaussianTvWeight::exponential(0.7)})
    EXPECT_EQ(gaussian_tv_closed_form(0.0, w), 0.0);
}

TEST(GaussianTv, ClosedFormsMatchQuadrature) {
  for (double a : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    for (auto w : {GaussianTvWeight::poly(0, 1), GaussianTvWeight::poly(1, 0.5), GaussianTvWeight::poly(-2, 3),
                   GaussianTvWeight::absolute(), GaussianTvWeight::exponential(0.0),
                   GaussianTvWeight::exponential(0.6), GaussianTvWeight::exponential(-1.1)}) {
      const double q = tv_quadrature(a, w.to_weight());
      EXPECT_NEAR(gaussian_tv_closed_form(a, w), q, 1e-8) << a;
      EXPECT_NEAR(weighted_tv({Distribution::normal(0, 1), Distribution::normal(a, 1), w.to_weight()}).value, q,
                  1e-8);
    }
  }
}

TEST(GaussianTv, PrintedFormsDiffer) {
  EXPECT_NEAR(gaussian_tv_closed_form(2.0, GaussianTvWeight::absolute(), Convention::as_printed), 1.682689, 1e-6);
  EXPECT_NEAR(gaussian_tv_closed_form(2.0, GaussianTvWeight::absolute()), 1.073141, 1e-6);
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    const double erf = std::erf(a / (2 * std::numbers::sqrt2));
    EXPECT_NEAR(gaussian_tv_closed_form(a, GaussianTvWeight::exponential(0.0)), erf, 1e-15);
    const double printed = gaussian_tv_closed_form(a, GaussianTvWeight::exponential(0.0), Convention::as_printed);
    EXPECT_LT(printed, 0.0);
    EXPECT_NE(printed, erf);
  }
  EXPECT_THROW(gaussian_tv_closed_form(1.0, GaussianTvWeight::poly(4, 1)), Error);
  EXPECT_THROW(gaussian_tv_closed_form(-1.0, GaussianTvWeight::absolute()), Error);
}
