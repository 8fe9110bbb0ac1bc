#include "winfer/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <tuple>

#include "winfer/error.hpp"

namespace winfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec unit(std::size_t d, std::size_t l) {
  Vec e = Vec::Zero(static_cast<Eigen::Index>(d));
  e(static_cast<Eigen::Index>(l)) = 1.0;
  return e;
}

double diff_step(double x) { return 1e-3 * std::max(1.0, std::abs(x)); }

// (-f(2h) + 8f(h) - 8f(-h) + f(-2h)) / 12h
double five_point(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
}

// theta and its difference stencil must lie in the domain.
void require_interior(const ParametricModel& model, const Vec& theta) {
  if (static_cast<std::size_t>(theta.size()) != model.dim())
    throw Error(ErrorKind::invalid_argument, "theta has the wrong dimension for " + model.name());
  if (!model.in_domain(theta))
    throw Error(ErrorKind::parameter_out_of_domain, "theta outside the domain of " + model.name());
  for (std::size_t l = 0; l < model.dim(); ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    const double h = 2 * diff_step(theta(li));
    Vec up = theta, dn = theta;
    up(li) += h;
    dn(li) -= h;
    if (!model.in_domain(up) || !model.in_domain(dn))
      throw Error(ErrorKind::boundary_theta, "theta is too close to the boundary of " + model.name());
  }
}

// e^t - 1 - t
double expm1_minus(double t) {
  if (std::abs(t) < 1e-3) return t * t * (0.5 + t * (1.0 / 6 + t * (1.0 / 24 + t / 120)));
  return std::expm1(t) - t;
}

std::size_t default_nodes(const PriorSpec& prior, std::size_t requested) {
  if (requested > 0) return requested;
  return prior.kind() == PriorSpec::Kind::gaussian ? 32 : 64;
}

struct Jacobian {
  Mat value;
  Mat error;
};

// d/dtheta_l of E[w(X) theta*_k(X)] by central differences with common random
// numbers, minus the E(theta)^n theta part; w is phi^(n) (power 1) or its
// square root (power 1/2), and base/base_grad are E or s at theta.
Jacobian mc_offset_jacobian(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                            std::size_t n, const EstimatorSpec& est, const EstimationConfig& cfg,
                            double power, double base, const Vec& base_grad) {
  const std::size_t d = model.dim(), dd = model.data_dim();
  Jacobian j{Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)),
             Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))};
  const double nn = static_cast<double>(n);
  for (std::size_t l = 0; l < d; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    const double h = cfg.bias_step * std::max(1.0, std::abs(theta(li)));
    Vec up = theta, dn = theta;
    up(li) += h;
    dn(li) -= h;
    if (!model.in_domain(up) || !model.in_domain(dn))
      throw Error(ErrorKind::bias_derivative_unavailable,
                  "difference step for the bias derivative leaves the parameter domain");
    const Distribution pu = model.member(up), pd = model.member(dn);
    auto weighted = [&](const Distribution& p, Rng& rng, std::vector<double>& buf) {
      double lw = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::span<double> x(buf.data() + i * dd, dd);
        p.draw(rng, x);
        lw += phi.log_at(x);
      }
      return lw == -kInf ? 0.0 : std::exp(power * lw);
    };
    McEstimate mc = mc_means(cfg.bias_trials, splitmix64(cfg.seed + 7919 * (l + 1)), d,
                             [&](Rng& rng, std::span<double> out) {
                               std::vector<double> bu(n * dd), bd(n * dd);
                               Rng twin = rng;
                               const double wu = weighted(pu, rng, bu);
                               const double wd = weighted(pd, twin, bd);
                               const Vec eu = est.evaluate(bu, n), ed = est.evaluate(bd, n);
                               for (std::size_t k = 0; k < d; ++k) {
                                 const auto ki = static_cast<Eigen::Index>(k);
                                 out[k] = (wu * eu(ki) - wd * ed(ki)) / (2 * h);
                               }
                             });
    for (std::size_t k = 0; k < d; ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      double v = mc.mean[k] - nn * std::pow(base, nn - 1) * base_grad(li) * theta(ki);
      if (k == l) v -= std::pow(base, nn);
      j.value(ki, li) = v;
      j.error(ki, li) = mc.std_error[k];
    }
  }
  return j;
}

// max_l sum_k (base^n delta_kl + J_kl)^2 / den_l, with the propagated error
// of the maximizing row.
std::pair<double, double> max_bound(const Jacobian& j, double base_n, const Vec& den, Convention conv) {
  double best = -kInf, best_err = 0.0;
  const auto d = den.size();
  for (Eigen::Index l = 0; l < d; ++l) {
    double num = 0.0, var = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double delta = (conv == Convention::as_printed || k == l) ? base_n : 0.0;
      const double a = delta + j.value(k, l);
      num += a * a;
      var += std::pow(2 * a * j.error(k, l), 2);
    }
    if (!(den(l) > 0)) throw Error(ErrorKind::evaluation_failure, "information is not positive");
    const double v = num / den(l);
    if (v > best) {
      best = v;
      best_err = std::sqrt(var) / den(l);
    }
  }
  return {best, best_err};
}

// s(theta) = int phi^{1/2} p and int phi^{1/2} grad p.
std::pair<double, Vec> root_mass(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                                 const IntegrationConfig& cfg) {
  const Distribution p = model.member(theta);
  auto score = model.score_at(theta);
  const double s =
      integrate_weighted(phi, p, [](std::span<const double>, double lphi, double lp) {
        return std::exp(0.5 * lphi + lp);
      }, cfg).value;
  Vec g(static_cast<Eigen::Index>(model.dim()));
  for (std::size_t l = 0; l < model.dim(); ++l)
    g(static_cast<Eigen::Index>(l)) =
        integrate_weighted(phi, p, [&](std::span<const double> x, double lphi, double lp) {
          return std::exp(0.5 * lphi + lp) * score(x)(static_cast<Eigen::Index>(l));
        }, cfg).value;
  return {s, g};
}

double log_bump(double u) { return -1.0 / (1.0 - u * u); }

// int_{-1}^{1} exp(-1/(1-u^2)) du and int psi (psi'/psi)^2.
const std::pair<double, double>& bump_constants() {
  static const std::pair<double, double> c = [] {
    IntegrationConfig cfg;
    cfg.rel_tol = 1e-13;
    const double z = integrate_interval([](double u) { return std::exp(log_bump(u)); }, -1, 1, cfg).value;
    const double j = integrate_interval(
                         [](double u) {
                           if (std::abs(u) >= 1) return 0.0;
                           const double r = 2 * u / std::pow(1 - u * u, 2);
                           return std::exp(log_bump(u)) * r * r;
                         },
                         -1, 1, cfg)
                         .value;
    return std::pair<double, double>{z, j / z};
  }();
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// ParametricModel

ParametricModel::ParametricModel(std::string name, std::size_t dim, Support support, MemberFn member,
                                 DomainFn domain, ScoreFn score)
    : name_(std::move(name)),
      dim_(dim),
      support_(std::move(support)),
      member_(std::move(member)),
      domain_(std::move(domain)),
      score_(std::move(score)) {
  if (dim_ < 1) throw Error(ErrorKind::invalid_argument, "parameter dimension must be >= 1");
  if (!member_) throw Error(ErrorKind::invalid_argument, "model needs a member constructor");
  if (support_.kind() == SupportKind::finite_alphabet)
    throw Error(ErrorKind::domain_mismatch, "parametric models on finite alphabets are not supported");
}

ParametricModel ParametricModel::gaussian_shift(double variance) {
  if (!(variance > 0)) throw Error(ErrorKind::illegal_parameters, "variance must be > 0");
  return ParametricModel(
      "gaussian-shift", 1, Support::real_line(),
      [variance](const Vec& t) { return Distribution::normal(t(0), variance); }, nullptr,
      [variance](std::span<const double> x, const Vec& t) { return Vec{{(x[0] - t(0)) / variance}}; });
}

ParametricModel ParametricModel::gaussian_scale() {
  return ParametricModel(
      "gaussian-scale", 1, Support::real_line(),
      [](const Vec& t) { return Distribution::normal(0.0, t(0) * t(0)); },
      [](const Vec& t) { return t(0) > 0; },
      [](std::span<const double> x, const Vec& t) {
        const double s = t(0);
        return Vec{{(x[0] * x[0] / (s * s) - 1.0) / s}};
      });
}

ParametricModel ParametricModel::natural(const ExponentialFamily& family) {
  return ParametricModel(
      family.name(), family.dim(), family.support(),
      [family](const Vec& t) { return family.member(t); },
      [family](const Vec& t) { return family.in_domain(t); },
      [family](std::span<const double> x, const Vec& t) -> Vec {
        return family.statistic(x) - family.log_normalizer_gradient(t);
      });
}

std::size_t ParametricModel::data_dim() const {
  return support_.kind() == SupportKind::real_vector ? support_.dim() : 1;
}

bool ParametricModel::in_domain(const Vec& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim_ || !theta.allFinite()) return false;
  return !domain_ || domain_(theta);
}

Distribution ParametricModel::member(const Vec& theta) const {
  if (!in_domain(theta))
    throw Error(ErrorKind::parameter_out_of_domain, "theta outside the domain of " + name_);
  return member_(theta);
}

double ParametricModel::log_density(std::span<const double> x, const Vec& theta) const {
  return member(theta).log_density(x);
}

Vec ParametricModel::score(std::span<const double> x, const Vec& theta) const {
  if (score_) return score_(x, theta);
  return finite_difference_score(x, theta);
}

Vec ParametricModel::finite_difference_score(std::span<const double> x, const Vec& theta) const {
  return score_at_fd(theta)(x);
}

std::function<Vec(std::span<const double>)> ParametricModel::score_at(const Vec& theta) const {
  if (score_) {
    auto fn = score_;
    return [fn, theta](std::span<const double> x) { return fn(x, theta); };
  }
  return score_at_fd(theta);
}

std::function<Vec(std::span<const double>)> ParametricModel::score_at_fd(const Vec& theta) const {
  require_interior(*this, theta);
  // members at theta + {2h, h, -h, -2h} e_l
  std::vector<Distribution> shifted;
  std::vector<double> steps;
  for (std::size_t l = 0; l < dim_; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    const double h = diff_step(theta(li));
    steps.push_back(h);
    for (double m : {2.0, 1.0, -1.0, -2.0}) {
      Vec t = theta;
      t(li) += m * h;
      shifted.push_back(member_(t));
    }
  }
  const std::size_t d = dim_;
  return [shifted = std::move(shifted), steps = std::move(steps), d](std::span<const double> x) {
    Vec g(static_cast<Eigen::Index>(d));
    for (std::size_t l = 0; l < d; ++l) {
      const double a = shifted[4 * l].log_density(x), b = shifted[4 * l + 1].log_density(x),
                   c = shifted[4 * l + 2].log_density(x), e = shifted[4 * l + 3].log_density(x);
      g(static_cast<Eigen::Index>(l)) = (-a + 8 * b - 8 * c + e) / (12 * steps[l]);
    }
    return g;
  };
}

// ---------------------------------------------------------------------------
// Estimators

EstimatorSpec EstimatorSpec::sample_mean(std::size_t data_dim) {
  EstimatorSpec e;
  e.name = "mean";
  e.dim = data_dim;
  e.evaluate = [data_dim](std::span<const double> xs, std::size_t n) {
    Vec m = Vec::Zero(static_cast<Eigen::Index>(data_dim));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < data_dim; ++j) m(static_cast<Eigen::Index>(j)) += xs[i * data_dim + j];
    return Vec(m / static_cast<double>(n));
  };
  return e;
}

EstimatorSpec EstimatorSpec::shifted_mean(double shift) {
  EstimatorSpec e;
  e.name = "shifted-mean";
  e.evaluate = [shift](std::span<const double> xs, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return Vec{{s / static_cast<double>(n) + shift}};
  };
  return e;
}

EstimatorSpec EstimatorSpec::root_mean_square() {
  EstimatorSpec e;
  e.name = "rms";
  e.evaluate = [](std::span<const double> xs, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xs[i] * xs[i];
    return Vec{{std::sqrt(s / static_cast<double>(n))}};
  };
  return e;
}

namespace {

double shift_root_mass(double theta, double variance, double gamma) {
  return std::exp(gamma * theta / 2 + variance * gamma * gamma / 8);
}

}  // namespace

EstimatorSpec gaussian_shift_mean_estimator(double variance, double gamma) {
  EstimatorSpec e = EstimatorSpec::sample_mean();
  const double vg = variance * gamma, vg2 = variance * gamma * gamma;
  auto en = [=](const Vec& t, std::size_t n) {
    return std::pow(closed_form::shift_gaussian_mass(t(0), variance, gamma), static_cast<double>(n));
  };
  auto sn = [=](const Vec& t, std::size_t n) {
    return std::pow(shift_root_mass(t(0), variance, gamma), static_cast<double>(n));
  };
  e.bias = [=](const Vec& t, std::size_t n) { return Vec{{vg * en(t, n)}}; };
  e.bias_jacobian = [=](const Vec& t, std::size_t n) {
    return Mat{{static_cast<double>(n) * vg2 * en(t, n)}};
  };
  e.offset = [=](const Vec& t, std::size_t n) { return Vec{{vg / 2 * sn(t, n)}}; };
  e.offset_jacobian = [=](const Vec& t, std::size_t n) {
    return Mat{{static_cast<double>(n) * vg2 / 4 * sn(t, n)}};
  };
  return e;
}

EstimatorSpec gaussian_shift_unbiased_estimator(double variance, double gamma) {
  EstimatorSpec e = EstimatorSpec::shifted_mean(-variance * gamma);
  const double vg = variance * gamma, vg2 = variance * gamma * gamma;
  auto sn = [=](const Vec& t, std::size_t n) {
    return std::pow(shift_root_mass(t(0), variance, gamma), static_cast<double>(n));
  };
  e.bias = [](const Vec&, std::size_t) { return Vec{{0.0}}; };
  e.bias_jacobian = [](const Vec&, std::size_t) { return Mat{{0.0}}; };
  e.offset = [=](const Vec& t, std::size_t n) { return Vec{{-vg / 2 * sn(t, n)}}; };
  e.offset_jacobian = [=](const Vec& t, std::size_t n) {
    return Mat{{-static_cast<double>(n) * vg2 / 4 * sn(t, n)}};
  };
  return e;
}

// ---------------------------------------------------------------------------
// Priors

PriorSpec PriorSpec::gaussian(Vec mean, Mat cov) {
  if (mean.size() < 1 || cov.rows() != mean.size() || cov.cols() != mean.size())
    throw Error(ErrorKind::invalid_argument, "prior mean/covariance dimensions disagree");
  auto llt = checked_cholesky(cov);
  PriorSpec p;
  p.kind_ = Kind::gaussian;
  p.center_ = std::move(mean);
  p.cov_ = std::move(cov);
  p.precision_ = llt.solve(Mat::Identity(p.cov_.rows(), p.cov_.cols()));
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < p.cov_.rows(); ++i) logdet += 2 * std::log(Mat(llt.matrixL())(i, i));
  p.log_norm_ = -0.5 * (static_cast<double>(p.center_.size()) * std::log(2 * std::numbers::pi) + logdet);
  return p;
}

PriorSpec PriorSpec::bump(Vec center, double width) {
  if (center.size() < 1) throw Error(ErrorKind::invalid_argument, "prior needs a dimension");
  if (!(width > 0) || !std::isfinite(width))
    throw Error(ErrorKind::prior_not_smooth, "bump width must be positive and finite");
  PriorSpec p;
  p.kind_ = Kind::bump;
  p.center_ = std::move(center);
  p.width_ = width;
  p.log_norm_ = -static_cast<double>(p.center_.size()) * std::log(bump_constants().first * width);
  return p;
}

double PriorSpec::log_density(const Vec& theta) const {
  const Vec z = theta - center_;
  if (kind_ == Kind::gaussian) return log_norm_ - 0.5 * z.dot(precision_ * z);
  double v = log_norm_;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double u = z(i) / width_;
    if (std::abs(u) >= 1) return -kInf;
    v += log_bump(u);
  }
  return v;
}

double PriorSpec::density(const Vec& theta) const { return std::exp(log_density(theta)); }

Vec PriorSpec::log_gradient(const Vec& theta) const {
  const Vec z = theta - center_;
  if (kind_ == Kind::gaussian) return -precision_ * z;
  Vec g = Vec::Zero(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double u = z(i) / width_;
    if (std::abs(u) >= 1) return Vec::Zero(z.size());
    g(i) = -2 * u / std::pow(1 - u * u, 2) / width_;
  }
  return g;
}

Vec PriorSpec::gradient(const Vec& theta) const {
  const double p = density(theta);
  return p > 0 ? Vec(p * log_gradient(theta)) : Vec(Vec::Zero(theta.size()));
}

void PriorSpec::rule(std::size_t per_dim, std::vector<Vec>& nodes, std::vector<double>& weights) const {
  if (per_dim < 1) throw Error(ErrorKind::invalid_argument, "prior rule needs >= 1 node");
  const std::size_t d = dim();
  std::vector<double> x, w;
  Mat l;
  if (kind_ == Kind::gaussian) {
    gauss_hermite(per_dim, x, w);
    l = Mat(cov_.llt().matrixL()) * std::numbers::sqrt2;
  } else {
    gauss_legendre(per_dim, x, w);
  }
  nodes.clear();
  weights.clear();
  std::vector<std::size_t> idx(d, 0);
  Vec z(static_cast<Eigen::Index>(d));
  while (true) {
    double weight = 1.0;
    for (std::size_t k = 0; k < d; ++k) {
      z(static_cast<Eigen::Index>(k)) = x[idx[k]];
      weight *= w[idx[k]];
    }
    if (kind_ == Kind::gaussian) {
      nodes.push_back(center_ + l * z);
      weights.push_back(weight / std::pow(std::numbers::pi, static_cast<double>(d) / 2));
    } else {
      Vec t = center_ + width_ * z;
      weights.push_back(weight * std::pow(width_, static_cast<double>(d)) * density(t));
      nodes.push_back(std::move(t));
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == per_dim) idx[k++] = 0;
    if (k == d) break;
  }
}

double PriorSpec::fisher_information() const {
  if (kind_ == Kind::gaussian) return precision_.trace();
  return static_cast<double>(dim()) * bump_constants().second / (width_ * width_);
}

// ---------------------------------------------------------------------------
// Fisher information

Mat weighted_fisher(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                    const IntegrationConfig& cfg) {
  require_interior(model, theta);
  const Distribution p = model.member(theta);
  auto score = model.score_at(theta);
  const auto d = static_cast<Eigen::Index>(model.dim());
  Mat info(d, d);
  for (Eigen::Index l = 0; l < d; ++l)
    for (Eigen::Index m = l; m < d; ++m) {
      const double v =
          integrate_weighted(phi, p, [&](std::span<const double> x, double lphi, double lp) {
            const Vec s = score(x);
            return std::exp(lphi + lp) * s(l) * s(m);
          }, cfg).value;
      info(l, m) = info(m, l) = v;
    }
  return info;
}

FisherAux weighted_fisher_aux(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                              const IntegrationConfig& cfg, double tol) {
  require_interior(model, theta);
  const Distribution p = model.member(theta);
  auto score = model.score_at(theta);
  const std::size_t d = model.dim();
  auto mass_at = [&](const Vec& t) {
    return integrate_weighted(phi, model.member(t), [](std::span<const double>, double lphi, double lp) {
      return std::exp(lphi + lp);
    }, cfg).value;
  };
  FisherAux aux;
  aux.mass = mass_at(theta);
  aux.mass_gradient.resize(static_cast<Eigen::Index>(d));
  aux.v.resize(static_cast<Eigen::Index>(d));
  aux.score_mean.resize(static_cast<Eigen::Index>(d));
  const WeightFunction unit_weight;
  double fd_error = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    const auto li = static_cast<Eigen::Index>(l);
    aux.v(li) = integrate_weighted(phi, p, [&](std::span<const double> x, double lphi, double lp) {
      return std::exp(lphi + lp) * score(x)(li);
    }, cfg).value;
    aux.score_mean(li) =
        integrate_weighted(unit_weight, p, [&](std::span<const double> x, double, double lp) {
          return std::exp(lp) * score(x)(li);
        }, cfg).value;
    const Vec e = unit(d, l);
    auto shifted = [&](double h) { return mass_at(theta + h * e); };
    const double h = diff_step(theta(li));
    const double coarse = five_point(shifted, h);
    aux.mass_gradient(li) = five_point(shifted, h / 2);
    fd_error = std::max(fd_error, std::abs(coarse - aux.mass_gradient(li)));
  }
  const double scale = std::max({1.0, aux.mass, aux.v.lpNorm<Eigen::Infinity>()});
  const double gap = (aux.mass_gradient - aux.v).lpNorm<Eigen::Infinity>();
  const double drift = aux.score_mean.lpNorm<Eigen::Infinity>();
  // The difference quotient's own error (step h against h/2) is allowed on top.
  if (!(gap <= tol * scale + fd_error) || !(drift <= tol)) {
    std::ostringstream os;
    os << model.name() << " at theta = " << theta.transpose() << ": |grad E - int phi grad p| = " << gap
       << ", |int grad p| = " << drift << " (tolerance " << tol << ", difference error " << fd_error << ")";
    throw Error(ErrorKind::regularity_failure, os.str());
  }
  return aux;
}

Mat nfold_weighted_fisher(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                          std::size_t n, const IntegrationConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  const FisherAux aux = weighted_fisher_aux(model, phi, theta, cfg);
  const Mat info = weighted_fisher(model, phi, theta, cfg);
  const double nn = static_cast<double>(n), e = aux.mass;
  Mat out = nn * std::pow(e, nn - 1) * info;
  if (n > 1) out += nn * (nn - 1) * std::pow(e, nn - 2) * aux.v * aux.v.transpose();
  return out;
}

MatrixEstimate nfold_weighted_fisher_mc(const ParametricModel& model, const WeightFunction& phi,
                                        const Vec& theta, std::size_t n, std::size_t samples,
                                        std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  const Distribution p = model.member(theta);
  auto score = model.score_at(theta);
  const std::size_t d = model.dim(), dd = model.data_dim(), k = d * (d + 1) / 2;
  McEstimate mc = mc_means(samples, seed, k, [&](Rng& rng, std::span<double> out) {
    std::vector<double> buf(n * dd);
    double lw = 0.0;
    Vec s = Vec::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i) {
      std::span<double> x(buf.data() + i * dd, dd);
      p.draw(rng, x);
      lw += phi.log_at(x);
      s += score(x);
    }
    const double w = lw == -kInf ? 0.0 : std::exp(lw);
    std::size_t j = 0;
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t m = l; m < d; ++m)
        out[j++] = w * s(static_cast<Eigen::Index>(l)) * s(static_cast<Eigen::Index>(m));
  });
  MatrixEstimate r;
  r.samples = samples;
  r.mean.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  r.std_error.resizeLike(r.mean);
  std::size_t j = 0;
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t m = l; m < d; ++m, ++j) {
      const auto li = static_cast<Eigen::Index>(l), mi = static_cast<Eigen::Index>(m);
      r.mean(li, mi) = r.mean(mi, li) = mc.mean[j];
      r.std_error(li, mi) = r.std_error(mi, li) = mc.std_error[j];
    }
  return r;
}

// ---------------------------------------------------------------------------
// Local expansion of the weighted KL divergence

KlExpansionReport kl_expansion_check(const ParametricModel& model, const WeightFunction& phi,
                                     const Vec& theta, std::size_t coordinate, std::vector<double> steps,
                                     const IntegrationConfig& cfg, Convention conv) {
  if (coordinate >= model.dim()) throw Error(ErrorKind::invalid_argument, "coordinate out of range");
  const auto li = static_cast<Eigen::Index>(coordinate);
  const FisherAux aux = weighted_fisher_aux(model, phi, theta, cfg);
  const Distribution p = model.member(theta);
  auto score = model.score_at(theta);
  const double ill = integrate_weighted(phi, p, [&](std::span<const double> x, double lphi, double lp) {
    const double s = score(x)(li);
    return std::exp(lphi + lp) * s * s;
  }, cfg).value;
  if (steps.empty()) {
    // Largest step in units of the coordinate's spread, keeping theta + 2h
    // inside the domain.
    double h0 = 0.2 * std::min(1.0, std::sqrt(aux.mass / ill));
    for (int k = 0; k < 40 && !model.in_domain(theta + 2 * h0 * unit(model.dim(), coordinate)); ++k) h0 /= 2;
    for (int k = 0; k < 10; ++k) steps.push_back(h0 * std::ldexp(1.0, -k));
  }

  KlExpansionReport rep;
  rep.coordinate = coordinate;
  rep.first_limit = -aux.v(li);
  rep.second_limit = 0.5 * ill;
  std::vector<std::pair<double, double>> noise;  // integration error carried into each quotient
  for (double h : steps) {
    if (!(h > 0)) throw Error(ErrorKind::invalid_argument, "steps must be > 0");
    Vec t2 = theta;
    t2(li) += h;
    const Distribution q = model.member(t2);
    const Integral ki = integrate_pair(phi, p, q, [](double lphi, double lp, double lq) {
      if (lp == -kInf) return 0.0;
      if (lq == -kInf) return kInf;
      return std::exp(lphi + lp) * (lp - lq);
    }, cfg);
    const double k = ki.value;
    // K + E(theta') - E(theta) = int phi p (e^t - 1 - t), t = ln(q/p)
    const Integral gi = integrate_pair(phi, p, q, [](double lphi, double lp, double lq) {
      if (lp == -kInf) return std::exp(lphi + lq);
      if (lq == -kInf) return kInf;
      const double t = lq - lp;
      if (t > 1) return std::exp(lphi + lq) - std::exp(lphi + lp) * (1 + t);
      return std::exp(lphi + lp) * expm1_minus(t);
    }, cfg);
    const double g = gi.value;
    KlExpansionRow row;
    row.h = h;
    noise.emplace_back(ki.error / h, (ki.error + gi.error) / (h * h));
    if (conv == Convention::as_printed) {
      row.first = -k / h;
      row.second = (2 * k - g) / (h * h);
    } else {
      row.first = k / h;
      row.second = g / (h * h);
    }
    rep.rows.push_back(row);
  }
  // Points whose deviation is within the integration noise are left out of the fit.
  auto order = [&](double limit, auto get, auto floor) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      const auto& r = rep.rows[i];
      const double e = std::abs(get(r) - limit);
      if (e > 1e-11 * std::max(1.0, std::abs(limit)) && e > 10 * floor(noise[i]))
        pts.emplace_back(std::log(r.h), std::log(e));
    }
    std::sort(pts.begin(), pts.end());
    if (pts.size() > 4) pts.resize(4);
    if (pts.size() < 2) return kInf;
    double mx = 0, my = 0;
    for (auto [x, y] : pts) mx += x, my += y;
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
    return sxy / sxx;
  };
  rep.first_order = order(rep.first_limit, [](const KlExpansionRow& r) { return r.first; },
                          [](const std::pair<double, double>& n) { return n.first; });
  rep.second_order = order(rep.second_limit, [](const KlExpansionRow& r) { return r.second; },
                           [](const std::pair<double, double>& n) { return n.second; });
  return rep;
}

// ---------------------------------------------------------------------------
// Cramer-Rao bounds

bool RiskBound::holds() const {
  return lhs >= rhs - 3.0 * std::hypot(lhs_error, rhs_error);
}

std::pair<double, double> weighted_squared_error(const ParametricModel& model, const WeightFunction& phi,
                                                 const Vec& theta, std::size_t n,
                                                 const EstimatorSpec& estimator, std::size_t trials,
                                                 std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (!estimator.evaluate || estimator.dim != model.dim())
    throw Error(ErrorKind::invalid_argument, "estimator output dimension does not match the model");
  const Distribution p = model.member(theta);
  const std::size_t dd = model.data_dim();
  McEstimate mc = mc_means(trials, seed, 1, [&](Rng& rng, std::span<double> out) {
    std::vector<double> buf(n * dd);
    double lw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<double> x(buf.data() + i * dd, dd);
      p.draw(rng, x);
      lw += phi.log_at(x);
    }
    out[0] = lw == -kInf ? 0.0 : std::exp(lw) * (estimator.evaluate(buf, n) - theta).squaredNorm();
  });
  return {mc.mean[0], mc.std_error[0]};
}

std::pair<double, double> cramer_rao_bound_A(const ParametricModel& model, const WeightFunction& phi,
                                             const Vec& theta, std::size_t n,
                                             const EstimatorSpec& estimator, const EstimationConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (estimator.dim != model.dim())
    throw Error(ErrorKind::invalid_argument, "estimator output dimension does not match the model");
  const FisherAux aux = weighted_fisher_aux(model, phi, theta, cfg.integration, cfg.regularity_tol);
  const Mat info = weighted_fisher(model, phi, theta, cfg.integration);
  const double nn = static_cast<double>(n), e = aux.mass;
  Jacobian j;
  if (estimator.bias_jacobian) {
    j.value = estimator.bias_jacobian(theta, n);
    j.error = Mat::Zero(j.value.rows(), j.value.cols());
  } else {
    if (!estimator.evaluate)
      throw Error(ErrorKind::bias_derivative_unavailable, "estimator has neither bias nor evaluator");
    j = mc_offset_jacobian(model, phi, theta, n, estimator, cfg, 1.0, e, aux.v);
  }
  Vec den(info.rows());
  for (Eigen::Index l = 0; l < den.size(); ++l)
    den(l) = nn * info(l, l) * std::pow(e, nn - 1) +
             (n > 1 ? nn * (nn - 1) * aux.v(l) * aux.v(l) * std::pow(e, nn - 2) : 0.0);
  return max_bound(j, std::pow(e, nn), den, cfg.convention);
}

std::pair<double, double> cramer_rao_bound_B(const ParametricModel& model, const WeightFunction& phi,
                                             const Vec& theta, std::size_t n,
                                             const EstimatorSpec& estimator, const EstimationConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (estimator.dim != model.dim())
    throw Error(ErrorKind::invalid_argument, "estimator output dimension does not match the model");
  weighted_fisher_aux(model, phi, theta, cfg.integration, cfg.regularity_tol);
  const Mat info = weighted_fisher(model, WeightFunction(), theta, cfg.integration);
  const auto [s, sgrad] = root_mass(model, phi, theta, cfg.integration);
  const double nn = static_cast<double>(n);
  Jacobian j;
  if (estimator.offset_jacobian) {
    j.value = estimator.offset_jacobian(theta, n);
    j.error = Mat::Zero(j.value.rows(), j.value.cols());
  } else {
    if (!estimator.evaluate)
      throw Error(ErrorKind::bias_derivative_unavailable, "estimator has neither offset nor evaluator");
    j = mc_offset_jacobian(model, phi, theta, n, estimator, cfg, 0.5, s, sgrad);
  }
  Vec den = nn * info.diagonal();
  return max_bound(j, std::pow(s, nn), den, cfg.convention);
}

RiskBound cramer_rao_A(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                        std::size_t n, const EstimatorSpec& estimator, const EstimationConfig& cfg) {
  RiskBound b;
  std::tie(b.rhs, b.rhs_error) = cramer_rao_bound_A(model, phi, theta, n, estimator, cfg);
  std::tie(b.lhs, b.lhs_error) = weighted_squared_error(model, phi, theta, n, estimator, cfg.trials, cfg.seed);
  b.trials = cfg.trials;
  return b;
}

RiskBound cramer_rao_B(const ParametricModel& model, const WeightFunction& phi, const Vec& theta,
                        std::size_t n, const EstimatorSpec& estimator, const EstimationConfig& cfg) {
  RiskBound b;
  std::tie(b.rhs, b.rhs_error) = cramer_rao_bound_B(model, phi, theta, n, estimator, cfg);
  std::tie(b.lhs, b.lhs_error) = weighted_squared_error(model, phi, theta, n, estimator, cfg.trials, cfg.seed);
  b.trials = cfg.trials;
  return b;
}

// ---------------------------------------------------------------------------
// van Trees bounds

namespace {

void prior_nodes(const ParametricModel& model, const PriorSpec& prior, const EstimationConfig& cfg,
                 std::vector<Vec>& nodes, std::vector<double>& weights) {
  if (prior.dim() != model.dim())
    throw Error(ErrorKind::invalid_argument, "prior dimension does not match the model");
  prior.rule(default_nodes(prior, cfg.prior_nodes), nodes, weights);
  for (const Vec& t : nodes)
    if (!model.in_domain(t))
      throw Error(ErrorKind::prior_not_smooth,
                  "prior puts mass outside the parameter domain of " + model.name());
}

}  // namespace

VanTreesInformation van_trees_information(const ParametricModel& model, const WeightFunction& phi,
                                          std::size_t n, const PriorSpec& prior,
                                          const EstimationConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  std::vector<Vec> nodes;
  std::vector<double> weights;
  prior_nodes(model, prior, cfg, nodes, weights);
  const double nn = static_cast<double>(n);
  NeumaierSum mass, t;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (weights[i] == 0.0) continue;
    const Vec& th = nodes[i];
    const FisherAux aux = weighted_fisher_aux(model, phi, th, cfg.integration, cfg.regularity_tol);
    const double tr = weighted_fisher(model, phi, th, cfg.integration).trace();
    const double e = aux.mass, en = std::pow(e, nn);
    const Vec g = prior.log_gradient(th);
    double term;
    if (cfg.convention == Convention::as_printed) {
      term = en * g.squaredNorm() + nn * tr + nn * (nn - 1) * aux.v.squaredNorm();
    } else {
      term = en * g.squaredNorm() + 2 * nn * std::pow(e, nn - 1) * g.dot(aux.v) +
             nn * std::pow(e, nn - 1) * tr +
             (n > 1 ? nn * (nn - 1) * std::pow(e, nn - 2) * aux.v.squaredNorm() : 0.0);
    }
    mass.add(weights[i] * en);
    t.add(weights[i] * term);
  }
  return {mass.value(), t.value()};
}

RiskBound van_trees(const ParametricModel& model, const WeightFunction& phi, std::size_t n,
                     const EstimatorSpec& estimator, const PriorSpec& prior, VanTreesVersion version,
                     const EstimationConfig& cfg) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  if (!estimator.evaluate || estimator.dim != model.dim())
    throw Error(ErrorKind::invalid_argument, "estimator output dimension does not match the model");
  std::vector<Vec> nodes;
  std::vector<double> weights;
  prior_nodes(model, prior, cfg, nodes, weights);

  RiskBound b;
  if (version == VanTreesVersion::C) {
    const VanTreesInformation info = van_trees_information(model, phi, n, prior, cfg);
    if (!(info.t > 0)) throw Error(ErrorKind::evaluation_failure, "T(phi, pi) is not positive");
    b.rhs = info.mass * info.mass / info.t;
  } else {
    NeumaierSum rhs;
    double var = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (weights[i] == 0.0) continue;
      const auto [r, err] = version == VanTreesVersion::A
                                ? cramer_rao_bound_A(model, phi, nodes[i], n, estimator, cfg)
                                : cramer_rao_bound_B(model, phi, nodes[i], n, estimator, cfg);
      rhs.add(weights[i] * r);
      var += std::pow(weights[i] * err, 2);
    }
    b.rhs = rhs.value();
    b.rhs_error = std::sqrt(var);
  }

  std::vector<Distribution> members;
  for (const Vec& t : nodes) members.push_back(model.member(t));
  const std::size_t dd = model.data_dim();
  McEstimate mc = mc_means(cfg.van_trees_trials, cfg.seed, 1, [&](Rng& rng, std::span<double> out) {
    std::vector<double> buf(n * dd);
    const Rng base = rng;
    NeumaierSum total;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (weights[i] == 0.0) continue;
      Rng r = base;
      double lw = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        std::span<double> x(buf.data() + j * dd, dd);
        members[i].draw(r, x);
        lw += phi.log_at(x);
      }
      if (lw != -kInf)
        total.add(weights[i] * std::exp(lw) * (estimator.evaluate(buf, n) - nodes[i]).squaredNorm());
      rng = r;
    }
    out[0] = total.value();
  });
  b.lhs = mc.mean[0];
  b.lhs_error = mc.std_error[0];
  b.trials = cfg.van_trees_trials;
  return b;
}

// ---------------------------------------------------------------------------
// Closed forms

namespace closed_form {

double shift_gaussian_mass(double theta, double variance, double gamma) {
  return std::exp(theta * gamma + variance * gamma * gamma / 2);
}

double shift_gaussian_fisher(double theta, double variance, double gamma) {
  return (1.0 / variance + gamma * gamma) * shift_gaussian_mass(theta, variance, gamma);
}

double shift_gaussian_mean_risk(double theta, double variance, double gamma, std::size_t n) {
  const double nn = static_cast<double>(n);
  return variance / nn * std::pow(shift_gaussian_mass(theta, variance, gamma), nn) *
         (1 + nn * gamma * gamma * variance);
}

double shift_gaussian_unbiased_risk(double theta, double variance, double gamma, std::size_t n) {
  const double nn = static_cast<double>(n);
  return variance / nn * std::pow(shift_gaussian_mass(theta, variance, gamma), nn);
}

double shift_gaussian_unbiased_bound(double theta, double variance, double gamma, std::size_t n) {
  const double nn = static_cast<double>(n);
  return shift_gaussian_unbiased_risk(theta, variance, gamma, n) / (1 + nn * gamma * gamma * variance);
}

double shift_gaussian_mean_bound_B(double theta, double variance, double gamma, std::size_t n) {
  const double nn = static_cast<double>(n);
  return variance / nn * std::exp(nn * (gamma * theta + gamma * gamma * variance / 4)) *
         std::pow(1 + nn * gamma * gamma * variance / 4, 2);
}

double scale_gaussian_fisher(double theta, double gamma) {
  const double g2 = gamma * gamma;
  return std::exp(g2 / 2) * (2 + 4 * g2 + g2 * g2) / (theta * theta);
}

double scale_gaussian_nfold_fisher(double theta, double gamma, std::size_t n, Convention conv) {
  const double nn = static_cast<double>(n);
  const double info = scale_gaussian_fisher(theta, gamma);
  if (conv == Convention::as_printed) return nn * info;
  const double e = std::exp(gamma * gamma / 2);
  const double v = gamma * gamma * e / theta;
  return nn * std::pow(e, nn - 1) * info + nn * (nn - 1) * std::pow(e, nn - 2) * v * v;
}

}  // namespace closed_form

}  // namespace winfer
