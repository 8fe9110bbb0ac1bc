#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "winfer/distribution.hpp"
#include "winfer/support.hpp"
#include "winfer/weight.hpp"

namespace winfer {

struct IntegrationConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_subdivisions = 2000;
  double tail_mass_bound = 1e-14;
  std::size_t mc_samples = 200000;
  std::uint64_t mc_seed = 20240611;
  // Explicit truncation of unbounded scalar domains. When unset, tail panels
  // are added until their mass falls below tail_mass_bound.
  std::optional<double> lower;
  std::optional<double> upper;
  // Gauss-Hermite nodes per dimension for real_vector supports (d <= 3).
  std::size_t hermite_nodes = 40;

  void validate() const;
};

enum class Method { closed_form, quadrature, exact_sum, monte_carlo };
const char* to_string(Method m);

struct Integral {
  double value = 0.0;
  double error = 0.0;
  Method method = Method::quadrature;
};

// Where the mass of a scalar integrand sits: the core interval is
// [lo - 8 scale, hi + 8 scale], tails are handled by growing panels.
struct ScalarHint {
  double lo = 0.0;
  double hi = 0.0;
  double scale = 1.0;
};

// Reference Gaussian for multivariate quadrature.
struct VectorHint {
  Vec mean;
  Mat cov;
};

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(std::span<const double>)>;

// Adaptive Gauss-Kronrod (10/21) on a finite interval with global bisection
// of the worst subinterval.
Integral integrate_interval(const ScalarFn& f, double a, double b, const IntegrationConfig& cfg);

// Scalar supports. On finite alphabets f receives the symbol index; on the
// integer lattice it receives k = 0, 1, 2, ...
Integral integrate(const ScalarFn& f, const Support& support, const IntegrationConfig& cfg,
                   const ScalarHint& hint = {});

// real_vector supports: tensor Gauss-Hermite for d <= 3, importance-sampled
// Monte Carlo from the reference Gaussian otherwise.
Integral integrate(const VectorFn& f, const Support& support, const IntegrationConfig& cfg,
                   const VectorHint& hint);

// E_phi(g) = integral of phi * g against the reference measure.
Integral weighted_expectation(const WeightFunction& phi, const ScalarFn& g, const Support& support,
                              const IntegrationConfig& cfg, const ScalarHint& hint = {});

// Integrand over a weighted pair in log coordinates: h(log phi, log p, log q).
// Points with phi = 0 are skipped. h may return +inf, which makes the
// integral +inf (used for q-null sets under a weighted p).
using PairIntegrand = std::function<double(double, double, double)>;

Integral integrate_pair(const WeightFunction& phi, const Distribution& p, const Distribution& q,
                        const PairIntegrand& h, const IntegrationConfig& cfg);

// As integrate_pair, with the outcome x passed first (the symbol index on
// finite alphabets, the first coordinate on vector supports).
using PointPairIntegrand = std::function<double(double, double, double, double)>;
Integral integrate_pair_at(const WeightFunction& phi, const Distribution& p, const Distribution& q,
                           const PointPairIntegrand& h, const IntegrationConfig& cfg);

// Same with one distribution: h(log phi, log p).
Integral integrate_single(const WeightFunction& phi, const Distribution& p,
                          const std::function<double(double, double)>& h,
                          const IntegrationConfig& cfg);

// Weighted integral over one distribution with the full outcome passed:
// h(x, log phi, log p). Scalar supports pass a one-element x (the symbol
// index on finite alphabets). Points where phi or p vanish are skipped.
using PointIntegrand = std::function<double(std::span<const double>, double, double)>;
Integral integrate_weighted(const WeightFunction& phi, const Distribution& p, const PointIntegrand& h,
                            const IntegrationConfig& cfg);

// Checks that p, q and phi share a support.
void check_problem_support(const WeightFunction& phi, const Distribution& p, const Distribution& q);

// Gauss-Hermite nodes/weights for weight e^{-x^2} (Golub-Welsch).
void gauss_hermite(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);
// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

// Compensated summation.
class NeumaierSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace winfer
