#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "winfer/divergence.hpp"

namespace winfer {

// x -> D(x) in [0,1]. On finite alphabets the rule is a vector indexed by
// symbol; elsewhere a function of the outcome.
class DecisionRule {
 public:
  static DecisionRule table(std::vector<double> values);
  static DecisionRule function(std::function<double(double)> fn);
  static DecisionRule constant(double value);

  double operator()(double x) const;
  bool is_table() const { return !values_.empty(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  std::function<double(double)> fn_;
};

struct ErrorLosses {
  double type1 = 0.0;  // E_phi(p D)
  double type2 = 0.0;  // E_phi(q (1 - D))
};

ErrorLosses error_losses(const HypothesisProblem& prob, const DecisionRule& rule,
                         const IntegrationConfig& cfg = {});

// Indicator of {q > p}; ties go to D = 0.
DecisionRule optimal_rule(const HypothesisProblem& prob);

// Delta - tau, the smallest achievable type I + type II loss.
DivergenceValue min_total_error(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool holds = true;
};

struct BoundReport {
  double mass_p = 0.0, mass_q = 0.0;
  double delta = 0.0, tau = 0.0, rho = 0.0, eta = 0.0, kl = 0.0;
  double min_total_error = 0.0;
  double lower_quadratic = 0.0;  // rho^2 / (2 Delta)
  double lower_sqrt = 0.0;       // Delta - sqrt(Delta^2 - rho^2)
  double pinsker = 0.0;          // sqrt(K/2) sqrt(E_phi(p)), bound on tau
  double bretagnolle_huber = 0.0;            // sqrt(Delta^2 - e^{-K}) as printed
  double bretagnolle_huber_tilted = 0.0;     // sqrt(Delta^2 - E_p^2 e^{-K/E_p})
  std::vector<BoundCheck> checks;

  const BoundCheck& check(const std::string& name) const;
};

// Evaluates every single-observation bound and the orderings between them.
// Comparisons allow tolerance tol * max(1, |rhs|).
BoundReport error_bound_report(const HypothesisProblem& prob, const IntegrationConfig& cfg = {},
                               double tol = 1e-12);

struct ProductProblem {
  HypothesisProblem base;
  std::size_t n = 1;
};

// Exact inf of the n-fold total loss on a finite alphabet.
// By explicit enumeration of all m^n tuples (m^n <= 1e7).
double nfold_min_total_error_product(const ProductProblem& pp);
// By symbol-count compositions with multinomial weights (<= 1e6 compositions).
double nfold_min_total_error_compositions(const ProductProblem& pp);

struct NFoldBounds {
  std::size_t n = 1;
  double lower = 0.0;          // rho^{2n} / (E_p^n + E_q^n)
  double upper = 0.0;          // rho^n
  double upper_divergence = 0.0;  // E_p^n e^{-n A}
  double upper_tv = 0.0;       // (Delta^2 - tau^2)^{n/2}
  std::optional<double> hellinger_bound;  // e^{-n eta^2}, only when Delta <= 1
  double asymptotic_lower = 0.0;          // (1-eps)/(2 Delta) e^{-n E_p^{n-1} K}
  bool asymptotic_applicable = false;     // E_p >= 1 and n >= n0
  std::optional<double> exact;
  std::string exact_method;  // product, compositions, or the reason it is missing
  std::vector<BoundCheck> checks;
};

struct NFoldOptions {
  double epsilon = 0.01;
  std::size_t n0 = 20;
  double tol = 1e-12;
};

NFoldBounds nfold_error_bounds(const ProductProblem& pp, const IntegrationConfig& cfg = {},
                               const NFoldOptions& opt = {});

// ln E_phi(p) - K(p||q) / E_phi(p)
double stein_sanov_limit(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});

struct SteinSanovEstimate {
  double rate = 0.0;            // (1/n) ln of the weighted type II loss
  double type1_level = 0.0;     // attained type I loss / E_phi(p)^n
  double rate_std_error = 0.0;  // Monte Carlo only
  Method method = Method::exact_sum;
};

enum class SteinSanovMethod { exact_enumeration, monte_carlo };

struct SteinSanovOptions {
  SteinSanovMethod method = SteinSanovMethod::exact_enumeration;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

// Rule D_n = 1 - 1{|S_n/n - K/E_p| <= eta}, S_n the log-likelihood-ratio sum.
SteinSanovEstimate stein_sanov_empirical(const ProductProblem& pp, double eta,
                                         const SteinSanovOptions& opt = {},
                                         const IntegrationConfig& cfg = {});

// Tilted laws phi p / E_phi(p), phi q / E_phi(q) and the statistic ln(p/q).
struct TiltedPair {
  Distribution pi;
  Distribution theta;
  double mass_p = 0.0, mass_q = 0.0;
  double mean_pi = 0.0;     // K(p||q) / E_phi(p)
  double mean_theta = 0.0;  // -K(q||p) / E_phi(q)

  double z(double x) const;

 private:
  friend TiltedPair make_tilted_pair(const HypothesisProblem&, const IntegrationConfig&);
  Distribution p_, q_;
};

TiltedPair make_tilted_pair(const HypothesisProblem& prob, const IntegrationConfig& cfg = {});

}  // namespace winfer
