#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winfer/random.hpp"
#include "winfer/support.hpp"

namespace winfer {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Links a distribution to a catalog exponential-family member.
struct FamilyTag {
  std::string name;                      // exponential, poisson, gaussian-scalar, gaussian-multivariate, gamma
  std::map<std::string, double> params;  // conventional parameters
  Vec mean;                              // multivariate Gaussian only
  Mat cov;
};

// Density w.r.t. the support's reference measure. Evaluation goes through log
// densities so that tails underflow to -inf rather than 0/0.
class Distribution {
 public:
  using LogDensity = std::function<double(double)>;
  using LogDensityVec = std::function<double(std::span<const double>)>;
  using Sampler = std::function<double(Rng&)>;
  using SamplerVec = std::function<void(Rng&, std::span<double>)>;

  static Distribution finite(std::vector<double> pmf);
  static Distribution finite(std::vector<double> pmf, Support support);
  static Distribution bernoulli(double p);
  static Distribution normal(double mean, double variance);
  static Distribution exponential(double rate);
  static Distribution gamma(double shape, double rate);
  static Distribution poisson(double mean);
  static Distribution mvn(Vec mean, Mat cov);
  // User-supplied scalar density. center/scale guide the quadrature panels.
  static Distribution custom(Support support, LogDensity log_density, double center, double scale,
                             Sampler sampler = nullptr);

  const Support& support() const { return support_; }

  double density(double x) const;
  double log_density(double x) const;
  double density(std::span<const double> x) const;
  double log_density(std::span<const double> x) const;

  // Finite alphabets only.
  const std::vector<double>& pmf() const { return pmf_; }

  bool has_sampler() const { return static_cast<bool>(sampler_) || static_cast<bool>(sampler_vec_); }
  double draw(Rng& rng) const;
  void draw(Rng& rng, std::span<double> out) const;

  double center() const { return center_; }
  double scale() const { return scale_; }
  const std::optional<FamilyTag>& tag() const { return tag_; }

 private:
  Support support_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  std::vector<double> log_pmf_;
  LogDensity log_density_;
  LogDensityVec log_density_vec_;
  Sampler sampler_;
  SamplerVec sampler_vec_;
  double center_ = 0.0;
  double scale_ = 1.0;
  std::optional<FamilyTag> tag_;
};

// n reproducible draws. Finite alphabets return symbol values.
std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed);
std::vector<std::vector<double>> sample_vectors(const Distribution& dist, std::size_t n,
                                                std::uint64_t seed);

// Cholesky factor of a positive-definite matrix (d <= 8); throws
// illegal-parameters when the input is not positive definite.
Eigen::LLT<Mat> checked_cholesky(const Mat& m);

}  // namespace winfer
