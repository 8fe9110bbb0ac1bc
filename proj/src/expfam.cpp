#include "winfer/expfam.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <numbers>

#include "winfer/error.hpp"

namespace winfer {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Vec scalar(double v) { return Vec::Constant(1, v); }

// Precision matrix and mean of a multivariate natural parameter.
struct MvnNatural {
  Mat precision;
  Vec mean;
  Mat cov;
  double logdet_precision = 0.0;
  bool ok = false;
};

MvnNatural mvn_unpack(const Vec& theta, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  MvnNatural r;
  Mat t2 = Eigen::Map<const Mat>(theta.data() + n, n, n);
  r.precision = -(t2 + t2.transpose());
  Eigen::LLT<Mat> llt(r.precision);
  if (llt.info() != Eigen::Success) return r;
  Mat L = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(L(i, i) > 0.0)) return r;
    r.logdet_precision += 2.0 * std::log(L(i, i));
  }
  r.cov = llt.solve(Mat::Identity(n, n));
  r.mean = llt.solve(theta.head(n));
  r.ok = true;
  return r;
}

}  // namespace

ExponentialFamily ExponentialFamily::exponential() {
  ExponentialFamily f;
  f.kind_ = FamilyKind::exponential;
  f.support_ = Support::half_line(0.0);
  return f;
}

ExponentialFamily ExponentialFamily::poisson() {
  ExponentialFamily f;
  f.kind_ = FamilyKind::poisson;
  f.support_ = Support::nonneg_integers();
  return f;
}

ExponentialFamily ExponentialFamily::gaussian_scalar() {
  ExponentialFamily f;
  f.kind_ = FamilyKind::gaussian_scalar;
  f.support_ = Support::real_line();
  return f;
}

ExponentialFamily ExponentialFamily::gaussian_multivariate(std::size_t d) {
  if (d < 1 || d > 8) throw Error(ErrorKind::illegal_parameters, "dimension must satisfy 1 <= d <= 8");
  ExponentialFamily f;
  f.kind_ = FamilyKind::gaussian_multivariate;
  f.d_ = d;
  f.support_ = Support::real_vector(d);
  return f;
}

ExponentialFamily ExponentialFamily::gamma() {
  ExponentialFamily f;
  f.kind_ = FamilyKind::gamma;
  f.support_ = Support::half_line(0.0);
  return f;
}

ExponentialFamily catalog_family(const std::string& name, std::size_t d) {
  if (name == "exponential") return ExponentialFamily::exponential();
  if (name == "poisson") return ExponentialFamily::poisson();
  if (name == "gaussian-scalar") return ExponentialFamily::gaussian_scalar();
  if (name == "gaussian-multivariate") return ExponentialFamily::gaussian_multivariate(d);
  if (name == "gamma") return ExponentialFamily::gamma();
  throw Error(ErrorKind::illegal_parameters, "unknown family '" + name + "'");
}

std::string ExponentialFamily::name() const {
  switch (kind_) {
    case FamilyKind::exponential: return "exponential";
    case FamilyKind::poisson: return "poisson";
    case FamilyKind::gaussian_scalar: return "gaussian-scalar";
    case FamilyKind::gaussian_multivariate: return "gaussian-multivariate";
    case FamilyKind::gamma: return "gamma";
  }
  return "";
}

std::size_t ExponentialFamily::dim() const {
  switch (kind_) {
    case FamilyKind::exponential:
    case FamilyKind::poisson: return 1;
    case FamilyKind::gaussian_scalar:
    case FamilyKind::gamma: return 2;
    case FamilyKind::gaussian_multivariate: return d_ + d_ * d_;
  }
  return 0;
}

std::size_t ExponentialFamily::data_dim() const {
  return kind_ == FamilyKind::gaussian_multivariate ? d_ : 1;
}

bool ExponentialFamily::in_domain(const Vec& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim() || !theta.allFinite()) return false;
  switch (kind_) {
    case FamilyKind::exponential: return theta(0) > 0.0;
    case FamilyKind::poisson: return true;
    case FamilyKind::gaussian_scalar: return theta(1) < 0.0;
    case FamilyKind::gaussian_multivariate: return mvn_unpack(theta, d_).ok;
    case FamilyKind::gamma: return theta(0) < 0.0 && theta(1) > -1.0;
  }
  return false;
}

void ExponentialFamily::require_domain(const Vec& theta, const char* what) const {
  if (static_cast<std::size_t>(theta.size()) != dim())
    throw Error(ErrorKind::domain_violation, std::string(what) + ": wrong natural-parameter length");
  if (!in_domain(theta))
    throw Error(ErrorKind::parameter_out_of_domain,
                std::string(what) + " lies outside the " + name() + " natural domain");
}

Vec ExponentialFamily::statistic(std::span<const double> x) const {
  switch (kind_) {
    case FamilyKind::exponential: return scalar(-x[0]);
    case FamilyKind::poisson: return scalar(x[0]);
    case FamilyKind::gaussian_scalar: return Vec{{x[0], x[0] * x[0]}};
    case FamilyKind::gamma: return Vec{{x[0], std::log(x[0])}};
    case FamilyKind::gaussian_multivariate: {
      const auto n = static_cast<Eigen::Index>(d_);
      Eigen::Map<const Vec> xv(x.data(), n);
      Vec t(n + n * n);
      t.head(n) = xv;
      Mat outer = xv * xv.transpose();
      t.tail(n * n) = Eigen::Map<const Vec>(outer.data(), n * n);
      return t;
    }
  }
  return {};
}

double ExponentialFamily::carrier(double x) const {
  return kind_ == FamilyKind::poisson ? -std::lgamma(x + 1.0) : 0.0;
}

double ExponentialFamily::log_normalizer(const Vec& theta) const {
  require_domain(theta, "theta");
  switch (kind_) {
    case FamilyKind::exponential: return -std::log(theta(0));
    case FamilyKind::poisson: return std::exp(theta(0));
    case FamilyKind::gaussian_scalar:
      return -theta(0) * theta(0) / (4.0 * theta(1)) + 0.5 * std::log(-std::numbers::pi / theta(1));
    case FamilyKind::gaussian_multivariate: {
      auto m = mvn_unpack(theta, d_);
      const auto n = static_cast<Eigen::Index>(d_);
      return 0.5 * theta.head(n).dot(m.mean) +
             0.5 * (static_cast<double>(d_) * kLog2Pi - m.logdet_precision);
    }
    case FamilyKind::gamma: {
      const double shape = theta(1) + 1.0;
      return std::lgamma(shape) - shape * std::log(-theta(0));
    }
  }
  return 0.0;
}

Vec ExponentialFamily::log_normalizer_gradient(const Vec& theta) const {
  require_domain(theta, "theta");
  switch (kind_) {
    case FamilyKind::exponential: return scalar(-1.0 / theta(0));
    case FamilyKind::poisson: return scalar(std::exp(theta(0)));
    case FamilyKind::gaussian_scalar: {
      const double mu = -theta(0) / (2.0 * theta(1));
      const double s2 = -1.0 / (2.0 * theta(1));
      return Vec{{mu, mu * mu + s2}};
    }
    case FamilyKind::gaussian_multivariate: {
      auto m = mvn_unpack(theta, d_);
      const auto n = static_cast<Eigen::Index>(d_);
      Vec g(n + n * n);
      g.head(n) = m.mean;
      Mat second = m.cov + m.mean * m.mean.transpose();
      g.tail(n * n) = Eigen::Map<const Vec>(second.data(), n * n);
      return g;
    }
    case FamilyKind::gamma: {
      const double shape = theta(1) + 1.0;
      const double rate = -theta(0);
      return Vec{{shape / rate, boost::math::digamma(shape) - std::log(rate)}};
    }
  }
  return {};
}

double ExponentialFamily::log_density(std::span<const double> x, const Vec& theta) const {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (kind_ == FamilyKind::gamma && !(x[0] > 0.0)) return ninf;
  if (kind_ == FamilyKind::exponential && x[0] < 0.0) return ninf;
  if (kind_ == FamilyKind::poisson && (x[0] < 0.0 || std::floor(x[0]) != x[0])) return ninf;
  return theta.dot(statistic(x)) - log_normalizer(theta) + carrier(x[0]);
}

Vec ExponentialFamily::natural(const Distribution& d) const {
  const auto& tag = d.tag();
  if (!tag || tag->name != name())
    throw Error(ErrorKind::domain_mismatch, "distribution is not a member of the " + name() + " family");
  const auto& p = tag->params;
  switch (kind_) {
    case FamilyKind::exponential: return scalar(p.at("lambda"));
    case FamilyKind::poisson: return scalar(std::log(p.at("lambda")));
    case FamilyKind::gaussian_scalar: {
      const double s2 = p.at("sigma2");
      return Vec{{p.at("mu") / s2, -0.5 / s2}};
    }
    case FamilyKind::gamma: return Vec{{-p.at("beta"), p.at("lambda") - 1.0}};
    case FamilyKind::gaussian_multivariate: {
      if (static_cast<std::size_t>(tag->mean.size()) != d_)
        throw Error(ErrorKind::domain_mismatch, "dimension differs from the family");
      const auto n = static_cast<Eigen::Index>(d_);
      Mat prec = checked_cholesky(tag->cov).solve(Mat::Identity(n, n));
      Vec theta(n + n * n);
      theta.head(n) = prec * tag->mean;
      Mat half = -0.5 * prec;
      theta.tail(n * n) = Eigen::Map<const Vec>(half.data(), n * n);
      return theta;
    }
  }
  return {};
}

Distribution ExponentialFamily::member(const Vec& theta) const {
  require_domain(theta, "theta");
  switch (kind_) {
    case FamilyKind::exponential: return Distribution::exponential(theta(0));
    case FamilyKind::poisson: return Distribution::poisson(std::exp(theta(0)));
    case FamilyKind::gaussian_scalar: {
      const double s2 = -0.5 / theta(1);
      return Distribution::normal(theta(0) * s2, s2);
    }
    case FamilyKind::gamma: return Distribution::gamma(theta(1) + 1.0, -theta(0));
    case FamilyKind::gaussian_multivariate: {
      auto m = mvn_unpack(theta, d_);
      Mat cov = 0.5 * (m.cov + m.cov.transpose());
      return Distribution::mvn(m.mean, cov);
    }
  }
  throw Error(ErrorKind::illegal_parameters, "unknown family");
}

double bregman(const ConvexFn& F, const GradientFn& grad, const Vec& theta2, const Vec& theta) {
  return F(theta2) - F(theta) - (theta2 - theta).dot(grad(theta));
}

double bregman(const ExponentialFamily& fam, const Vec& theta2, const Vec& theta) {
  fam.require_domain(theta, "theta");
  fam.require_domain(theta2, "theta'");
  return bregman([&](const Vec& t) { return fam.log_normalizer(t); },
                 [&](const Vec& t) { return fam.log_normalizer_gradient(t); }, theta2, theta);
}

double burbea_rao(const ConvexFn& F, const Vec& theta, const Vec& theta2, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
  return alpha * F(theta) + (1.0 - alpha) * F(theta2) - F(alpha * theta + (1.0 - alpha) * theta2);
}

double burbea_rao(const ExponentialFamily& fam, const Vec& theta, const Vec& theta2, double alpha) {
  fam.require_domain(theta, "theta");
  fam.require_domain(theta2, "theta'");
  return burbea_rao([&](const Vec& t) { return fam.log_normalizer(t); }, theta, theta2, alpha);
}

// ---------------------------------------------------------------------------

AdjointFamily::AdjointFamily(ExponentialFamily base, WeightFunction phi, IntegrationConfig cfg)
    : base_(std::move(base)), phi_(std::move(phi)), cfg_(std::move(cfg)) {
  cfg_.validate();
  phi_.check_support(base_.support());
  if (phi_.kind() == WeightFunction::Kind::exponential && phi_.gamma_vector().size() != 1 &&
      phi_.gamma_vector().size() != base_.data_dim())
    throw Error(ErrorKind::illegal_parameters, "exponential weight dimension differs from the data");
}

std::optional<Vec> AdjointFamily::tilt() const {
  const auto n = static_cast<Eigen::Index>(base_.dim());
  if (phi_.kind() == WeightFunction::Kind::constant) return Vec::Zero(n);
  if (phi_.kind() != WeightFunction::Kind::exponential) return std::nullopt;
  const auto& g = phi_.gamma_vector();
  Vec shift = Vec::Zero(n);
  switch (base_.kind()) {
    case FamilyKind::exponential: shift(0) = -g[0]; break;
    case FamilyKind::poisson:
    case FamilyKind::gaussian_scalar:
    case FamilyKind::gamma: shift(0) = g[0]; break;
    case FamilyKind::gaussian_multivariate:
      for (std::size_t i = 0; i < base_.data_dim(); ++i)
        shift(static_cast<Eigen::Index>(i)) = g.size() == 1 ? g[0] : g[i];
      break;
  }
  return shift;
}

bool AdjointFamily::closed_form() const {
  if (tilt()) return true;
  return base_.kind() == FamilyKind::exponential && phi_.laplace(1.0).has_value();
}

bool AdjointFamily::compatible(const Vec& theta) const {
  if (!base_.in_domain(theta)) return false;
  if (auto s = tilt()) return base_.in_domain(theta + *s);
  if (base_.kind() == FamilyKind::exponential) {
    if (auto l = phi_.laplace(theta(0))) return std::isfinite(*l);
  }
  return true;
}

Integral AdjointFamily::mass_integral(const Vec& theta) const {
  base_.require_domain(theta, "theta");
  if (auto s = tilt()) {
    if (phi_.kind() == WeightFunction::Kind::constant)
      return {phi_.constant_value(), 0.0, Method::closed_form};
    const Vec shifted = theta + *s;
    if (!base_.in_domain(shifted))
      throw Error(ErrorKind::parameter_out_of_domain,
                  "E_phi(theta) is infinite: weight " + phi_.describe() + " too steep for this member");
    return {std::exp(base_.log_normalizer(shifted) - base_.log_normalizer(theta)), 0.0,
            Method::closed_form};
  }
  if (base_.kind() == FamilyKind::exponential && phi_.laplace(1.0)) {
    auto l = phi_.laplace(theta(0));
    if (!l) throw Error(ErrorKind::parameter_out_of_domain, "Laplace transform of the weight diverges");
    return {theta(0) * *l, 0.0, Method::closed_form};
  }
  auto r = weighted_mass(phi_, base_.member(theta), cfg_);
  return {r.value, r.error, r.method};
}

double AdjointFamily::mass(const Vec& theta) const { return mass_integral(theta).value; }

Vec AdjointFamily::weighted_statistic(const Vec& theta) const {
  const double e = mass(theta);
  if (auto s = tilt()) return e * base_.log_normalizer_gradient(theta + *s);
  if (base_.kind() == FamilyKind::exponential && phi_.laplace(1.0)) {
    // int phi (-x) lambda e^{-lambda x} = lambda * d/dlambda int phi e^{-lambda x}
    return scalar(theta(0) * *phi_.laplace_derivative(theta(0)));
  }
  const Distribution p = base_.member(theta);
  const auto n = static_cast<Eigen::Index>(base_.dim());
  Vec out(n);
  if (base_.kind() == FamilyKind::gaussian_multivariate) {
    const auto& tag = *p.tag();
    VectorHint hint{tag.mean, tag.cov};
    for (Eigen::Index j = 0; j < n; ++j) {
      out(j) = integrate(
                   [&](std::span<const double> x) {
                     const double lw = phi_.log_at(x);
                     if (lw == -std::numeric_limits<double>::infinity()) return 0.0;
                     return std::exp(lw + p.log_density(x)) * base_.statistic(x)(j);
                   },
                   base_.support(), cfg_, hint)
                   .value;
    }
    return out;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j) = integrate_pair_at(
                 phi_, p, p,
                 [&](double x, double lphi, double lp, double) {
                   if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
                   return std::exp(lphi + lp) * base_.statistic(x)(j);
                 },
                 cfg_)
                 .value;
  }
  return out;
}

double AdjointFamily::log_normalizer(const Vec& theta) const {
  return base_.log_normalizer(theta) + std::log(mass(theta));
}

Vec AdjointFamily::log_normalizer_gradient(const Vec& theta) const {
  return weighted_statistic(theta) / mass(theta);
}

double AdjointFamily::carrier(double x) const { return base_.carrier(x) + phi_.log_value(x); }

// ---------------------------------------------------------------------------

namespace {

// int phi p_theta g(x), g given on scalar supports.
double weighted_integral(const AdjointFamily& adj, const Vec& theta, const std::function<double(double)>& g) {
  const Distribution p = adj.base().member(theta);
  return integrate_pair_at(
             adj.phi(), p, p,
             [&](double x, double lphi, double lp, double) {
               if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
               return std::exp(lphi + lp) * g(x);
             },
             adj.config())
      .value;
}

void check_open_unit(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
}

}  // namespace

double weighted_bregman(const AdjointFamily& adj, const Vec& theta2, const Vec& theta) {
  const auto& F = adj.base();
  F.require_domain(theta, "theta");
  F.require_domain(theta2, "theta'");
  const double e = adj.mass(theta);
  return e * (F.log_normalizer(theta2) - F.log_normalizer(theta)) -
         (theta2 - theta).dot(adj.weighted_statistic(theta));
}

double expfam_shannon(const AdjointFamily& adj, const Vec& theta) {
  const auto& F = adj.base();
  const double e = adj.mass(theta);
  double h = e * F.log_normalizer(theta) - theta.dot(adj.weighted_statistic(theta));
  if (F.has_carrier())
    h -= weighted_integral(adj, theta, [&](double x) { return F.carrier(x); });
  return h;
}

double expfam_renyi(const AdjointFamily& adj, const Vec& theta, double alpha) {
  check_open_unit(alpha);
  const auto& F = adj.base();
  F.require_domain(theta, "theta");
  const Vec scaled = alpha * theta;
  F.require_domain(scaled, "alpha * theta");
  const double e = adj.mass(theta);
  double log_j;
  if (!F.has_carrier()) {
    log_j = std::log(adj.mass(scaled));
  } else {
    log_j = std::log(weighted_integral(adj, scaled,
                                       [&](double x) { return std::exp((alpha - 1.0) * F.carrier(x)); }));
  }
  return e / (1.0 - alpha) *
         (log_j + F.log_normalizer(scaled) - alpha * F.log_normalizer(theta) - std::log(e));
}

double expfam_chernoff(const AdjointFamily& adj, const Vec& theta, const Vec& theta2, double alpha) {
  check_open_unit(alpha);
  const auto& F = adj.base();
  F.require_domain(theta, "theta");
  F.require_domain(theta2, "theta'");
  const Vec mid = alpha * theta + (1.0 - alpha) * theta2;
  F.require_domain(mid, "alpha theta + (1-alpha) theta'");
  return burbea_rao(F, theta, theta2, alpha) - std::log(adj.mass(mid)) + std::log(adj.mass(theta));
}

double expfam_bhattacharyya(const AdjointFamily& adj, const Vec& theta, const Vec& theta2) {
  return expfam_chernoff(adj, theta, theta2, 0.5);
}

AdjointCoefficients adjoint_coefficients(const AdjointFamily& adj, const Vec& theta) {
  const auto& F = adj.base();
  F.require_domain(theta, "theta");
  AdjointCoefficients c;
  auto mi = adj.mass_integral(theta);
  c.e0 = mi.value;
  c.method = adj.closed_form() ? Method::closed_form : mi.method;
  const Vec m = adj.weighted_statistic(theta);
  switch (F.kind()) {
    case FamilyKind::exponential: {
      c.e1 = scalar(-m(0));
      c.laplace = c.e0 / theta(0);
      c.laplace_derivative = m(0) / theta(0);
      break;
    }
    case FamilyKind::poisson: c.e1 = m; break;
    case FamilyKind::gaussian_scalar:
      c.e1 = scalar(m(0));
      c.e2 = Mat::Constant(1, 1, m(1));
      break;
    case FamilyKind::gaussian_multivariate: {
      const auto n = static_cast<Eigen::Index>(F.data_dim());
      c.e1 = m.head(n);
      c.e2 = Eigen::Map<const Mat>(m.data() + n, n, n);
      break;
    }
    case FamilyKind::gamma: {
      const double shape = theta(1) + 1.0;
      const double rate = -theta(0);
      c.e1 = scalar(m(0));
      c.gamma_l = rate * m(0) + (1.0 - shape) * m(1);
      break;
    }
  }
  return c;
}

}  // namespace winfer
