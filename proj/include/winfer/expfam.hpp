#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "winfer/distribution.hpp"
#include "winfer/divergence.hpp"
#include "winfer/integrate.hpp"
#include "winfer/weight.hpp"

namespace winfer {

enum class FamilyKind { exponential, poisson, gaussian_scalar, gaussian_multivariate, gamma };

// Densities exp(theta . t(x) - F(theta) + k(x)) on a fixed support.
//
// Natural coordinates:
//   exponential            theta = lambda                t = -x
//   poisson                theta = ln lambda             t = l, k = -ln l!
//   gaussian-scalar        theta = (mu/s2, -1/(2 s2))    t = (x, x^2)
//   gaussian-multivariate  theta = (S^-1 mu, vec(-S^-1/2))  t = (x, vec(x x^T))
//   gamma                  theta = (-beta, lambda - 1)   t = (x, ln x)
// The multivariate matrix block is column-major and only its symmetric part
// enters F.
class ExponentialFamily {
 public:
  static ExponentialFamily exponential();
  static ExponentialFamily poisson();
  static ExponentialFamily gaussian_scalar();
  static ExponentialFamily gaussian_multivariate(std::size_t d);
  static ExponentialFamily gamma();

  FamilyKind kind() const { return kind_; }
  std::string name() const;
  std::size_t dim() const;       // natural parameter dimension
  std::size_t data_dim() const;  // 1, or d for the multivariate Gaussian
  const Support& support() const { return support_; }

  bool in_domain(const Vec& theta) const;
  // Throws parameter-out-of-domain naming `what` when theta is outside.
  void require_domain(const Vec& theta, const char* what) const;

  Vec statistic(std::span<const double> x) const;
  Vec statistic(double x) const { return statistic(std::span<const double>(&x, 1)); }
  double carrier(double x) const;
  bool has_carrier() const { return kind_ == FamilyKind::poisson; }
  double log_normalizer(const Vec& theta) const;
  Vec log_normalizer_gradient(const Vec& theta) const;
  double log_density(std::span<const double> x, const Vec& theta) const;

  // Conventional <-> natural. natural() accepts catalog-tagged distributions
  // of this family; member() builds the tagged distribution back.
  Vec natural(const Distribution& d) const;
  Distribution member(const Vec& theta) const;

 private:
  FamilyKind kind_ = FamilyKind::exponential;
  std::size_t d_ = 1;
  Support support_;
};

// name: exponential, poisson, gaussian-scalar, gaussian-multivariate, gamma.
ExponentialFamily catalog_family(const std::string& name, std::size_t d = 1);

// Bregman divergence of a convex F with gradient.
using ConvexFn = std::function<double(const Vec&)>;
using GradientFn = std::function<Vec(const Vec&)>;
double bregman(const ConvexFn& F, const GradientFn& grad, const Vec& theta2, const Vec& theta);
double bregman(const ExponentialFamily& fam, const Vec& theta2, const Vec& theta);

// alpha F(theta) + (1-alpha) F(theta2) - F(alpha theta + (1-alpha) theta2)
double burbea_rao(const ConvexFn& F, const Vec& theta, const Vec& theta2, double alpha);
double burbea_rao(const ExponentialFamily& fam, const Vec& theta, const Vec& theta2, double alpha);

// The weighted family phi p_theta / E_phi(theta), with log-normalizer
// F* = F + ln E_phi. E_phi and the weighted statistic int phi t p_theta are
// closed form for constant and exponential weights (the weighted member is
// again in the family, shifted in theta) and for Laplace-transformable
// weights on the exponential family; other weights use quadrature.
class AdjointFamily {
 public:
  AdjointFamily(ExponentialFamily base, WeightFunction phi, IntegrationConfig cfg = {});

  const ExponentialFamily& base() const { return base_; }
  const WeightFunction& phi() const { return phi_; }
  const IntegrationConfig& config() const { return cfg_; }

  // True when E_phi(theta) is available without quadrature.
  bool closed_form() const;
  // theta in the base domain and E_phi(theta) finite.
  bool compatible(const Vec& theta) const;

  double mass(const Vec& theta) const;  // E_phi(theta)
  Integral mass_integral(const Vec& theta) const;
  // int phi t p_theta
  Vec weighted_statistic(const Vec& theta) const;
  double log_normalizer(const Vec& theta) const;           // F*
  Vec log_normalizer_gradient(const Vec& theta) const;     // grad F*
  double carrier(double x) const;                          // k + ln phi

  // Natural shift taking phi p_theta to a multiple of p_{theta + shift};
  // set for constant and exponential weights.
  std::optional<Vec> tilt() const;

 private:
  ExponentialFamily base_;
  WeightFunction phi_;
  IntegrationConfig cfg_;
};

// E_phi(theta) [F(theta2) - F(theta) - <theta2 - theta, grad F*(theta)>],
// equal to the weighted KL of p_theta from p_theta2.
double weighted_bregman(const AdjointFamily& adj, const Vec& theta2, const Vec& theta);

// Weighted Shannon entropy. The carrier term -int phi p k is added when k != 0.
double expfam_shannon(const AdjointFamily& adj, const Vec& theta);
// Weighted Renyi entropy, alpha in (0,1). With k != 0 the integral
// int phi p_{alpha theta} e^{(alpha-1)k} is evaluated numerically.
double expfam_renyi(const AdjointFamily& adj, const Vec& theta, double alpha);
// U_{F,alpha}(theta, theta2) - ln E_phi(theta_alpha) + ln E_phi(theta)
double expfam_chernoff(const AdjointFamily& adj, const Vec& theta, const Vec& theta2, double alpha);
double expfam_bhattacharyya(const AdjointFamily& adj, const Vec& theta, const Vec& theta2);

struct AdjointCoefficients {
  double e0 = 0.0;  // E_phi(theta)
  // Gaussians: int phi p x and int phi p x x^T. Poisson and exponential:
  // int phi p x in e1(0).
  Vec e1;
  Mat e2;
  std::optional<double> gamma_l;       // gamma: int phi [beta x + (1-lambda) ln x] p
  std::optional<double> laplace;       // exponential: int phi e^{-lambda x}
  std::optional<double> laplace_derivative;
  Method method = Method::closed_form;
};

AdjointCoefficients adjoint_coefficients(const AdjointFamily& adj, const Vec& theta);

}  // namespace winfer
