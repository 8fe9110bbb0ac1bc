#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "winfer/distribution.hpp"
#include "winfer/divergence.hpp"
#include "winfer/expfam.hpp"
#include "winfer/integrate.hpp"
#include "winfer/random.hpp"
#include "winfer/weight.hpp"

namespace winfer {

// Smooth family p_theta, theta in a domain of R^d. Members are Distributions
// (density, sampler, quadrature hints); the score grad_theta ln p_theta(x) is
// analytic when supplied, otherwise a five-point difference in theta.
class ParametricModel {
 public:
  using MemberFn = std::function<Distribution(const Vec&)>;
  using ScoreFn = std::function<Vec(std::span<const double>, const Vec&)>;
  using DomainFn = std::function<bool(const Vec&)>;

  // Finite alphabets are not supported.
  ParametricModel(std::string name, std::size_t dim, Support support, MemberFn member,
                  DomainFn domain = nullptr, ScoreFn score = nullptr);

  // N(theta, variance)
  static ParametricModel gaussian_shift(double variance);
  // N(0, theta^2), theta > 0
  static ParametricModel gaussian_scale();
  // Catalog family in natural coordinates; score t(x) - grad F(theta).
  static ParametricModel natural(const ExponentialFamily& family);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const Support& support() const { return support_; }
  std::size_t data_dim() const;

  bool in_domain(const Vec& theta) const;
  // Throws parameter-out-of-domain.
  Distribution member(const Vec& theta) const;
  double log_density(std::span<const double> x, const Vec& theta) const;

  bool has_analytic_score() const { return static_cast<bool>(score_); }
  Vec score(std::span<const double> x, const Vec& theta) const;
  Vec finite_difference_score(std::span<const double> x, const Vec& theta) const;
  // Score at a fixed theta; the difference fallback caches the shifted members.
  std::function<Vec(std::span<const double>)> score_at(const Vec& theta) const;

 private:
  std::function<Vec(std::span<const double>)> score_at_fd(const Vec& theta) const;

  std::string name_;
  std::size_t dim_;
  Support support_;
  MemberFn member_;
  DomainFn domain_;
  ScoreFn score_;
};

// theta*(x_1..x_n). `sample` holds n consecutive outcomes of data_dim values.
// The optional analytic terms take (theta, n): the weighted bias b with
// W(theta, theta*) = E(theta)^n theta + b(theta), the version-B offset c with
// Z(theta, theta*) = s(theta)^n theta + c(theta), and their Jacobians
// (entry (k, l) = d/dtheta_l of component k). They are only valid for the
// weight they were derived under.
struct EstimatorSpec {
  using EvalFn = std::function<Vec(std::span<const double>, std::size_t)>;
  using TermFn = std::function<Vec(const Vec&, std::size_t)>;
  using JacobianFn = std::function<Mat(const Vec&, std::size_t)>;

  std::string name;
  std::size_t dim = 1;
  EvalFn evaluate;
  TermFn bias;
  JacobianFn bias_jacobian;
  TermFn offset;
  JacobianFn offset_jacobian;

  // Componentwise mean of the n outcomes.
  static EstimatorSpec sample_mean(std::size_t data_dim = 1);
  // mean + shift
  static EstimatorSpec shifted_mean(double shift);
  // sqrt(mean of x^2), for scale families.
  static EstimatorSpec root_mean_square();
};

// Sample mean and the zero-bias estimator mean - variance*gamma for
// N(theta, variance) under phi(x) = e^{gamma x}, with analytic b and c.
EstimatorSpec gaussian_shift_mean_estimator(double variance, double gamma);
EstimatorSpec gaussian_shift_unbiased_estimator(double variance, double gamma);

// Smooth prior density on the parameter space.
class PriorSpec {
 public:
  enum class Kind { gaussian, bump };

  static PriorSpec gaussian(Vec mean, Mat cov);
  // prod_i psi((theta_i - center_i)/width) with psi(u) = exp(-1/(1-u^2)) on
  // |u| < 1, normalized.
  static PriorSpec bump(Vec center, double width);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return static_cast<std::size_t>(center_.size()); }
  double density(const Vec& theta) const;
  double log_density(const Vec& theta) const;
  Vec gradient(const Vec& theta) const;        // grad pi
  Vec log_gradient(const Vec& theta) const;    // grad ln pi (zero off support)
  // Tensor rule with sum_i w_i f(theta_i) ~ int f pi: Gauss-Hermite for the
  // Gaussian, Gauss-Legendre on the box for the bump.
  void rule(std::size_t per_dim, std::vector<Vec>& nodes, std::vector<double>& weights) const;
  // int |grad pi|^2 / pi
  double fisher_information() const;

 private:
  Kind kind_ = Kind::gaussian;
  Vec center_;
  Mat cov_;
  Mat precision_;
  double log_norm_ = 0.0;
  double width_ = 1.0;
};

struct EstimationConfig {
  IntegrationConfig integration;
  std::size_t trials = 1'000'000;          // Monte Carlo trials for the weighted squared error
  std::size_t van_trees_trials = 100'000;  // per prior node, common random numbers across nodes
  std::size_t bias_trials = 200'000;       // Monte Carlo bias derivatives, when not analytic
  double bias_step = 1e-2;
  std::uint64_t seed = 20240611;
  std::size_t prior_nodes = 0;             // per dimension; 0 picks 32 (Gaussian) or 64 (bump)
  double regularity_tol = 1e-6;
  // as_printed drops the Kronecker delta in R and S and uses the printed T.
  Convention convention = Convention::corrected;
};

// int phi 1(p > 0) p^{-1} grad p^T grad p
Mat weighted_fisher(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                    const IntegrationConfig& cfg = {});

struct FisherAux {
  double mass = 0.0;     // E(theta) = int phi p_theta
  Vec mass_gradient;     // grad E by differences of the quadrature
  Vec v;                 // int phi grad p_theta
  Vec score_mean;        // int grad p_theta
};

// Also checks grad E = V and int grad p = 0 to within tol (relative to the
// scale of E and V, plus the difference quotient's step-halving error); a
// failure throws regularity-failure.
FisherAux weighted_fisher_aux(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                              const IntegrationConfig& cfg = {}, double tol = 1e-6);

// n E^{n-1} I^w + n(n-1) E^{n-2} V V^T
Mat nfold_weighted_fisher(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                          std::size_t n, const IntegrationConfig& cfg = {});

struct MatrixEstimate {
  Mat mean;
  Mat std_error;
  std::size_t samples = 0;
};

// Monte Carlo of the defining n-fold integral
// E[phi^(n)(X) (sum_i score(X_i)) (sum_i score(X_i))^T].
MatrixEstimate nfold_weighted_fisher_mc(const ParametricModel& model, const WeightFunction& phi,
                                        const Vec& theta, std::size_t n, std::size_t samples,
                                        std::uint64_t seed);

struct KlExpansionRow {
  double h = 0.0;
  double first = 0.0;   // K(p_theta || p_theta') / (theta'_l - theta_l)
  double second = 0.0;  // [K + E(theta') - E(theta)] / h^2
};

struct KlExpansionReport {
  std::size_t coordinate = 0;
  double first_limit = 0.0;   // -dE/dtheta_l
  double second_limit = 0.0;  // I^w_ll / 2
  std::vector<KlExpansionRow> rows;
  // Least-squares slopes of log|quotient - limit| against log h; +inf when
  // fewer than two steps are usable (the quotient is exact to noise level).
  double first_order = 0.0;
  double second_order = 0.0;
};

// theta' = theta + h e_l over a decreasing grid. The default is h0 2^-k,
// k = 0..9, with h0 = 0.2 min(1, sqrt(E / I^w_ll)) halved until theta + 2 h0
// is in the domain. Orders are fitted on the four smallest steps whose
// deviation exceeds ten times the integration error.
// as_printed uses the printed quotients: K/(theta_l - theta'_l) and
// [K + E(theta) - E(theta')]/h^2.
KlExpansionReport kl_expansion_check(const ParametricModel& model, const WeightFunction& phi,
                                     const Vec& theta, std::size_t coordinate,
                                     std::vector<double> steps = {}, const IntegrationConfig& cfg = {},
                                     Convention conv = Convention::corrected);

struct RiskBound {
  double lhs = 0.0;
  double lhs_error = 0.0;
  double rhs = 0.0;
  double rhs_error = 0.0;
  std::size_t trials = 0;
  // lhs >= rhs - 3 (combined standard error)
  bool holds() const;
  double margin() const { return lhs - rhs; }
};

// E_theta[phi^(n)(X) |theta*(X) - theta|^2] by Monte Carlo; the value and
// its standard error.
std::pair<double, double> weighted_squared_error(const ParametricModel& model, const WeightFunction& phi,
                                                 const Vec& theta, std::size_t n,
                                                 const EstimatorSpec& estimator, std::size_t trials,
                                                 std::uint64_t seed);

// R(theta, n) with the derivative-of-bias terms from the estimator (analytic
// or Monte Carlo central differences with common random numbers).
std::pair<double, double> cramer_rao_bound_A(const ParametricModel& model, const WeightFunction& phi,
                                             const Vec& theta, std::size_t n,
                                             const EstimatorSpec& estimator,
                                             const EstimationConfig& cfg = {});
// S(theta, n), built from s(theta) = E[phi^{1/2}] and the unweighted Fisher
// information.
std::pair<double, double> cramer_rao_bound_B(const ParametricModel& model, const WeightFunction& phi,
                                             const Vec& theta, std::size_t n,
                                             const EstimatorSpec& estimator,
                                             const EstimationConfig& cfg = {});

RiskBound cramer_rao_A(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                        std::size_t n, const EstimatorSpec& estimator, const EstimationConfig& cfg = {});
RiskBound cramer_rao_B(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                        std::size_t n, const EstimatorSpec& estimator, const EstimationConfig& cfg = {});

enum class VanTreesVersion { A, B, C };

struct VanTreesInformation {
  double mass = 0.0;  // int E(theta)^n pi
  double t = 0.0;     // T(phi, pi)
};

// T(phi, pi) = int int phi^(n) |grad(pi p^(n))|^2 / (pi p^(n)), i.e.
// int [E^n |grad pi|^2/pi + 2n E^{n-1} grad pi . grad E
//      + (n E^{n-1} tr I^w + n(n-1) E^{n-2} |grad E|^2) pi].
// as_printed: int [E^n |grad pi|^2/pi + (n tr I^w + n(n-1) |grad E|^2) pi].
VanTreesInformation van_trees_information(const ParametricModel& model, const WeightFunction& phi,
                                          std::size_t n, const PriorSpec& prior,
                                          const EstimationConfig& cfg = {});

// lhs: prior quadrature of the Monte Carlo weighted squared error. rhs:
// int R pi (A), int S pi (B) or [int E^n pi]^2 / T (C).
RiskBound van_trees(const ParametricModel& model, const WeightFunction& phi, std::size_t n,
                     const EstimatorSpec& estimator, const PriorSpec& prior, VanTreesVersion version,
                     const EstimationConfig& cfg = {});

// Closed forms for N(theta, variance) with phi(x) = e^{gamma x} and for
// N(0, theta^2) with phi(x) = e^{gamma x / theta}.
namespace closed_form {

double shift_gaussian_mass(double theta, double variance, double gamma);
double shift_gaussian_fisher(double theta, double variance, double gamma);
// Weighted squared error of the sample mean (also the version-A bound).
double shift_gaussian_mean_risk(double theta, double variance, double gamma, std::size_t n);
// Weighted squared error of mean - variance*gamma, and its version-A bound.
double shift_gaussian_unbiased_risk(double theta, double variance, double gamma, std::size_t n);
double shift_gaussian_unbiased_bound(double theta, double variance, double gamma, std::size_t n);
// Version-B bound for the sample mean.
double shift_gaussian_mean_bound_B(double theta, double variance, double gamma, std::size_t n);

double scale_gaussian_fisher(double theta, double gamma);
// n-fold weighted Fisher information. The printed form is n I^w(theta).
double scale_gaussian_nfold_fisher(double theta, double gamma, std::size_t n,
                                   Convention conv = Convention::corrected);

}  // namespace closed_form

}  // namespace winfer
