#pragma once

// Reproducible random problems: pmfs from a symmetric Dirichlet(1), weights
// log-uniform on [e^-2, e^2].

#include <cmath>
#include <vector>

#include "winfer/divergence.hpp"
#include "winfer/expfam.hpp"
#include "winfer/random.hpp"

namespace winfer::instances {

inline std::vector<double> dirichlet(Rng& rng, std::size_t m) {
  std::vector<double> v(m);
  double total = 0.0;
  for (auto& x : v) total += (x = rng.exponential(1.0));
  for (auto& x : v) x /= total;
  // Renormalize so the pmf passes the 1e-12 sum check exactly.
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) s += v[i];
  v[m - 1] = std::max(0.0, 1.0 - s);
  return v;
}

inline std::vector<double> log_uniform_weights(Rng& rng, std::size_t m) {
  std::vector<double> w(m);
  for (auto& x : w) x = std::exp(-2.0 + 4.0 * rng.uniform());
  return w;
}

inline HypothesisProblem random_finite_problem(Rng& rng, std::size_t m) {
  return {Distribution::finite(dirichlet(rng, m)), Distribution::finite(dirichlet(rng, m)),
          WeightFunction::table(log_uniform_weights(rng, m))};
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform());
}

// Continuous pairs from the catalog with exponential weights.
inline HypothesisProblem random_continuous_problem(Rng& rng, int kind) {
  switch (kind % 3) {
    case 0: {
      const double g = -0.5 + rng.uniform();
      return {Distribution::normal(-1 + 2 * rng.uniform(), log_uniform(rng, 0.5, 2)),
              Distribution::normal(-1 + 2 * rng.uniform(), log_uniform(rng, 0.5, 2)),
              WeightFunction::exponential(g)};
    }
    case 1: {
      const double l = log_uniform(rng, 1, 3), l2 = log_uniform(rng, 1, 3);
      return {Distribution::exponential(l), Distribution::exponential(l2),
              WeightFunction::exponential(0.5 * std::min(l, l2) * (rng.uniform() - 0.5))};
    }
    default:
      return {Distribution::gamma(log_uniform(rng, 1, 4), log_uniform(rng, 0.5, 2)),
              Distribution::gamma(log_uniform(rng, 1, 4), log_uniform(rng, 0.5, 2)),
              WeightFunction::polynomial({log_uniform(rng, 0.1, 1), log_uniform(rng, 0.1, 1)},
                                         Support::half_line(0))};
  }
}


// A catalog family with a compatible weight and two members.
struct ExpfamDraw {
  ExponentialFamily family;
  WeightFunction phi;
  Vec theta, theta2;
};

inline ExpfamDraw random_expfam_draw(Rng& rng, int kind) {
  const double u = rng.uniform();
  switch (kind % 5) {
    case 0: {
      const double l = log_uniform(rng, 0.5, 3), l2 = log_uniform(rng, 0.5, 3);
      WeightFunction w = u < 0.4   ? WeightFunction::exponential(0.8 * l * (rng.uniform() - 0.5))
                         : u < 0.7 ? WeightFunction::polynomial({log_uniform(rng, 0.1, 1), 1.0},
                                                                Support::half_line(0))
                                   : WeightFunction::absolute();
      return {ExponentialFamily::exponential(), w, Vec::Constant(1, l), Vec::Constant(1, l2)};
    }
    case 1: {
      const double l = log_uniform(rng, 0.3, 5), l2 = log_uniform(rng, 0.3, 5);
      WeightFunction w = u < 0.7 ? WeightFunction::exponential(-0.5 + rng.uniform())
                                 : WeightFunction::polynomial({1.0, 0.5}, Support::nonneg_integers());
      return {ExponentialFamily::poisson(), w, Vec::Constant(1, std::log(l)),
              Vec::Constant(1, std::log(l2))};
    }
    case 2: {
      auto theta = [&] {
        const double s2 = log_uniform(rng, 0.5, 2), mu = -1 + 2 * rng.uniform();
        return Vec{{mu / s2, -0.5 / s2}};
      };
      WeightFunction w = u < 0.5   ? WeightFunction::exponential(-0.6 + 1.2 * rng.uniform())
                         : u < 0.8 ? WeightFunction::polynomial({1.0, 0.0, 1.0}, Support::real_line())
                                   : WeightFunction::absolute();
      return {ExponentialFamily::gaussian_scalar(), w, theta(), theta()};
    }
    case 3: {
      auto fam = ExponentialFamily::gaussian_multivariate(2);
      auto member = [&] {
        Mat a(2, 2);
        a << 1 + rng.uniform(), 0.5 * (rng.uniform() - 0.5), 0.0, 1 + rng.uniform();
        Mat cov = a * a.transpose();
        Vec mean{{-1 + 2 * rng.uniform(), -1 + 2 * rng.uniform()}};
        return fam.natural(Distribution::mvn(mean, cov));
      };
      WeightFunction w = u < 0.7 ? WeightFunction::exponential(
                                       std::vector<double>{0.6 * (rng.uniform() - 0.5), 0.6 * (rng.uniform() - 0.5)})
                                 : WeightFunction::constant(0.5 + rng.uniform());
      return {fam, w, member(), member()};
    }
    default: {
      auto theta = [&] { return Vec{{-log_uniform(rng, 0.5, 2), log_uniform(rng, 1, 4) - 1}}; };
      Vec t = theta(), t2 = theta();
      WeightFunction w = u < 0.5 ? WeightFunction::exponential(0.4 * std::min(-t(0), -t2(0)) * (rng.uniform() - 0.3))
                                 : WeightFunction::polynomial({log_uniform(rng, 0.1, 1), log_uniform(rng, 0.1, 1)},
                                                              Support::half_line(0));
      return {ExponentialFamily::gamma(), w, t, t2};
    }
  }
}

}  // namespace winfer::instances
