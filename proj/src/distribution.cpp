#include "winfer/distribution.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "winfer/error.hpp"

namespace winfer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require(bool ok, const char* msg) {
  if (!ok) throw Error(ErrorKind::illegal_parameters, msg);
}

}  // namespace

Eigen::LLT<Mat> checked_cholesky(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > 8)
    throw Error(ErrorKind::illegal_parameters, "matrix must be square with 1 <= d <= 8");
  if (!m.isApprox(m.transpose(), 1e-12))
    throw Error(ErrorKind::illegal_parameters, "matrix is not symmetric");
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::illegal_parameters, "matrix is not positive definite");
  return llt;
}

Distribution Distribution::finite(std::vector<double> pmf) {
  Support s = Support::finite(pmf.size());
  return finite(std::move(pmf), std::move(s));
}

Distribution Distribution::finite(std::vector<double> pmf, Support support) {
  require(support.kind() == SupportKind::finite_alphabet, "pmf needs a finite alphabet");
  require(pmf.size() == support.size(), "pmf length differs from alphabet size");
  double total = 0.0;
  for (double v : pmf) {
    require(v >= 0.0 && std::isfinite(v), "pmf entries must be finite and >= 0");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12, "pmf must sum to 1 within 1e-12");
  Distribution d;
  d.support_ = std::move(support);
  d.pmf_ = std::move(pmf);
  d.log_pmf_.resize(d.pmf_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < d.pmf_.size(); ++i) {
    d.log_pmf_[i] = d.pmf_[i] > 0 ? std::log(d.pmf_[i]) : kNegInf;
    acc += d.pmf_[i];
    d.cdf_.push_back(acc);
  }
  return d;
}

Distribution Distribution::bernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, "Bernoulli parameter must lie in [0,1]");
  return finite({1.0 - p, p});
}

Distribution Distribution::normal(double mean, double variance) {
  require(std::isfinite(mean) && variance > 0.0, "normal needs finite mean and variance > 0");
  Distribution d;
  d.support_ = Support::real_line();
  const double sd = std::sqrt(variance);
  const double norm = -0.5 * (kLog2Pi + std::log(variance));
  d.log_density_ = [=](double x) {
    const double z = (x - mean) / sd;
    return norm - 0.5 * z * z;
  };
  d.sampler_ = [=](Rng& r) { return mean + sd * r.normal(); };
  d.center_ = mean;
  d.scale_ = sd;
  d.tag_ = FamilyTag{"gaussian-scalar", {{"mu", mean}, {"sigma2", variance}}, {}, {}};
  return d;
}

Distribution Distribution::exponential(double rate) {
  require(rate > 0.0, "exponential rate must be > 0");
  Distribution d;
  d.support_ = Support::half_line(0.0);
  const double lr = std::log(rate);
  d.log_density_ = [=](double x) { return x < 0 ? kNegInf : lr - rate * x; };
  d.sampler_ = [=](Rng& r) { return r.exponential(rate); };
  d.center_ = 1.0 / rate;
  d.scale_ = 1.0 / rate;
  d.tag_ = FamilyTag{"exponential", {{"lambda", rate}}, {}, {}};
  return d;
}

Distribution Distribution::gamma(double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "gamma needs shape > 0 and rate > 0");
  Distribution d;
  d.support_ = Support::half_line(0.0);
  const double norm = shape * std::log(rate) - std::lgamma(shape);
  d.log_density_ = [=](double x) {
    if (x < 0) return kNegInf;
    if (x == 0) return shape == 1.0 ? norm : (shape > 1.0 ? kNegInf : -kNegInf);
    return norm + (shape - 1.0) * std::log(x) - rate * x;
  };
  d.sampler_ = [=](Rng& r) { return r.gamma(shape, rate); };
  d.center_ = shape / rate;
  d.scale_ = std::sqrt(shape) / rate;
  d.tag_ = FamilyTag{"gamma", {{"lambda", shape}, {"beta", rate}}, {}, {}};
  return d;
}

Distribution Distribution::poisson(double mean) {
  require(mean > 0.0, "Poisson mean must be > 0");
  Distribution d;
  d.support_ = Support::nonneg_integers();
  const double lm = std::log(mean);
  d.log_density_ = [=](double x) {
    if (x < 0 || std::floor(x) != x) return kNegInf;
    return x * lm - mean - std::lgamma(x + 1.0);
  };
  d.sampler_ = [=](Rng& r) { return static_cast<double>(r.poisson(mean)); };
  d.center_ = mean;
  d.scale_ = std::sqrt(mean);
  d.tag_ = FamilyTag{"poisson", {{"lambda", mean}}, {}, {}};
  return d;
}

Distribution Distribution::mvn(Vec mean, Mat cov) {
  require(mean.size() == cov.rows(), "mean and covariance dimensions differ");
  auto llt = checked_cholesky(cov);
  const auto dim = static_cast<std::size_t>(mean.size());
  Distribution d;
  d.support_ = Support::real_vector(dim);
  Mat L = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) logdet += 2.0 * std::log(L(i, i));
  const double norm = -0.5 * (static_cast<double>(dim) * kLog2Pi + logdet);
  d.log_density_vec_ = [=](std::span<const double> x) {
    Vec r = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())) - mean;
    Vec z = L.triangularView<Eigen::Lower>().solve(r);
    return norm - 0.5 * z.squaredNorm();
  };
  d.sampler_vec_ = [=](Rng& rng, std::span<double> out) {
    Vec z(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    Vec x = mean + L * z;
    for (std::size_t i = 0; i < dim; ++i) out[i] = x(static_cast<Eigen::Index>(i));
  };
  d.tag_ = FamilyTag{"gaussian-multivariate", {}, mean, cov};
  return d;
}

Distribution Distribution::custom(Support support, LogDensity log_density, double center,
                                  double scale, Sampler sampler) {
  require(support.kind() != SupportKind::finite_alphabet &&
              support.kind() != SupportKind::real_vector,
          "custom densities are scalar; use finite() for alphabets");
  require(scale > 0.0, "scale hint must be > 0");
  Distribution d;
  d.support_ = std::move(support);
  d.log_density_ = std::move(log_density);
  d.sampler_ = std::move(sampler);
  d.center_ = center;
  d.scale_ = scale;
  return d;
}

double Distribution::log_density(double x) const {
  if (support_.kind() == SupportKind::finite_alphabet) {
    auto i = static_cast<std::size_t>(x);
    if (x < 0 || i >= log_pmf_.size() || std::floor(x) != x) return kNegInf;
    return log_pmf_[i];
  }
  if (!log_density_) throw Error(ErrorKind::domain_mismatch, "scalar evaluation of a vector density");
  return log_density_(x);
}

double Distribution::density(double x) const { return std::exp(log_density(x)); }

double Distribution::log_density(std::span<const double> x) const {
  if (log_density_vec_) return log_density_vec_(x);
  if (x.size() != 1) throw Error(ErrorKind::domain_mismatch, "vector point for a scalar density");
  return log_density(x[0]);
}

double Distribution::density(std::span<const double> x) const { return std::exp(log_density(x)); }

double Distribution::draw(Rng& rng) const {
  if (support_.kind() == SupportKind::finite_alphabet)
    return support_.values()[rng.categorical(cdf_)];
  if (!sampler_) throw Error(ErrorKind::no_sampler, "distribution has no scalar sampler");
  return sampler_(rng);
}

void Distribution::draw(Rng& rng, std::span<double> out) const {
  if (sampler_vec_) {
    sampler_vec_(rng, out);
    return;
  }
  out[0] = draw(rng);
}

std::vector<double> sample(const Distribution& dist, std::size_t n, std::uint64_t seed) {
  if (dist.support().kind() != SupportKind::finite_alphabet && !dist.has_sampler())
    throw Error(ErrorKind::no_sampler, "distribution has no sampler contract");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = dist.draw(rng);
  return out;
}

std::vector<std::vector<double>> sample_vectors(const Distribution& dist, std::size_t n,
                                                std::uint64_t seed) {
  if (!dist.has_sampler()) throw Error(ErrorKind::no_sampler, "distribution has no sampler contract");
  Rng rng(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(dist.support().dim()));
  for (auto& x : out) dist.draw(rng, x);
  return out;
}

}  // namespace winfer
