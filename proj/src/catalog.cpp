#include "winfer/catalog.hpp"

#include <cmath>
#include <numbers>

#include "winfer/error.hpp"

namespace winfer::closed_form {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::illegal_parameters, std::string(what) + " must be finite and > 0");
}

double laplace(const WeightFunction& phi, double lambda) {
  auto l = phi.laplace(lambda);
  if (!l || !std::isfinite(*l))
    throw Error(ErrorKind::parameter_out_of_domain,
                "Laplace transform of " + phi.describe() + " unavailable at this rate");
  return *l;
}

double laplace_derivative(const WeightFunction& phi, double lambda) {
  auto l = phi.laplace_derivative(lambda);
  if (!l || !std::isfinite(*l))
    throw Error(ErrorKind::parameter_out_of_domain,
                "Laplace transform of " + phi.describe() + " unavailable at this rate");
  return *l;
}

// ln sum_l exp(a(l)) over l = 0, 1, ... for a concave-in-l exponent.
double log_series(const std::function<double(double)>& a) {
  double peak = a(0.0);
  std::vector<double> terms;
  for (double l = 0.0;; l += 1.0) {
    const double v = a(l);
    terms.push_back(v);
    peak = std::max(peak, v);
    if (l > 10.0 && v < peak - 60.0 && v < a(l - 1.0)) break;
    if (l > 1e7) throw Error(ErrorKind::non_convergent_integral, "series did not decay");
  }
  NeumaierSum s;
  for (double v : terms) s.add(std::exp(v - peak));
  return peak + std::log(s.value());
}

AdjointFamily scalar_gaussian(const WeightFunction& phi) {
  return AdjointFamily(ExponentialFamily::gaussian_scalar(), phi);
}

Vec gaussian_theta(double mu, double s2) {
  check_positive(s2, "variance");
  return Vec{{mu / s2, -0.5 / s2}};
}

double gaussian_log_mass(const AdjointFamily& adj, double mu, double s2) {
  return std::log(adj.mass(gaussian_theta(mu, s2)));
}

struct MvnParts {
  Mat prec;
  double logdet = 0.0;
};

MvnParts mvn_parts(const Mat& s) {
  auto llt = checked_cholesky(s);
  MvnParts r;
  r.prec = llt.solve(Mat::Identity(s.rows(), s.cols()));
  Mat L = llt.matrixL();
  for (Eigen::Index i = 0; i < L.rows(); ++i) r.logdet += 2.0 * std::log(L(i, i));
  return r;
}

double logdet(const Mat& s) { return mvn_parts(s).logdet; }

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

AdjointFamily mvn_adjoint(const WeightFunction& phi, std::size_t d) {
  return AdjointFamily(ExponentialFamily::gaussian_multivariate(d), phi);
}

double mvn_log_mass(const AdjointFamily& adj, const Vec& mu, const Mat& s) {
  const auto& fam = adj.base();
  return std::log(adj.mass(fam.natural(Distribution::mvn(mu, symmetrize(s)))));
}

void check_same_dims(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2) {
  if (mu.size() != s.rows() || mu2.size() != s2.rows() || mu.size() != mu2.size())
    throw Error(ErrorKind::illegal_parameters, "mean/covariance dimensions differ");
}

AdjointFamily gamma_adjoint(const WeightFunction& phi) {
  return AdjointFamily(ExponentialFamily::gamma(), phi);
}

Vec gamma_theta(double lambda, double beta) {
  check_positive(lambda, "shape");
  check_positive(beta, "rate");
  return Vec{{-beta, lambda - 1.0}};
}

double gamma_F(double lambda, double beta) { return std::lgamma(lambda) - lambda * std::log(beta); }

}  // namespace

// --- exponential -----------------------------------------------------------

double exponential_kl(double lambda, double lambda2, const WeightFunction& phi) {
  check_positive(lambda, "rate");
  check_positive(lambda2, "rate");
  return lambda * std::log(lambda / lambda2) * laplace(phi, lambda) -
         lambda * (lambda2 - lambda) * laplace_derivative(phi, lambda);
}

double exponential_shannon(double lambda, const WeightFunction& phi) {
  check_positive(lambda, "rate");
  return -lambda * (std::log(lambda) * laplace(phi, lambda) + lambda * laplace_derivative(phi, lambda));
}

double exponential_renyi(double lambda, double alpha, const WeightFunction& phi) {
  check_positive(lambda, "rate");
  check_alpha(alpha);
  const double lp = laplace(phi, lambda);
  return lambda * lp / (1.0 - alpha) *
         (std::log(laplace(phi, alpha * lambda) / lp) + (alpha - 1.0) * std::log(lambda));
}

double exponential_chernoff(double lambda, double lambda2, double alpha, const WeightFunction& phi) {
  check_positive(lambda, "rate");
  check_positive(lambda2, "rate");
  check_alpha(alpha);
  const double mid = alpha * lambda + (1.0 - alpha) * lambda2;
  return -(alpha * std::log(lambda) + (1.0 - alpha) * std::log(lambda2) + std::log(laplace(phi, mid))) +
         std::log(lambda * laplace(phi, lambda));
}

double exponential_bhattacharyya(double lambda, double lambda2, const WeightFunction& phi) {
  check_positive(lambda, "rate");
  check_positive(lambda2, "rate");
  return -std::log(std::sqrt(lambda * lambda2) * laplace(phi, 0.5 * (lambda + lambda2))) +
         std::log(lambda * laplace(phi, lambda));
}

// --- Poisson ---------------------------------------------------------------

double poisson_mass(double lambda, double gamma) {
  check_positive(lambda, "mean");
  return std::exp(lambda * std::expm1(gamma));
}

double poisson_kl(double lambda, double lambda2, double gamma) {
  check_positive(lambda2, "mean");
  return poisson_mass(lambda, gamma) *
         (lambda2 - lambda + lambda * std::exp(gamma) * std::log(lambda / lambda2));
}

double poisson_shannon(double lambda, double gamma) {
  const double e = poisson_mass(lambda, gamma);
  const double m = lambda * std::exp(gamma);
  // sum_l Poisson(m)(l) ln l!
  NeumaierSum s;
  const double lm = std::log(m);
  for (double l = 2.0;; l += 1.0) {
    const double lf = std::lgamma(l + 1.0);
    const double term = std::exp(l * lm - m - lf) * lf;
    s.add(term);
    if (l > m && term < 1e-18 * std::max(1.0, s.value())) break;
    if (l > 1e7) throw Error(ErrorKind::non_convergent_integral, "series did not decay");
  }
  return e * (lambda - m * std::log(lambda) + s.value());
}

double poisson_renyi(double lambda, double alpha, double gamma, Convention conv) {
  check_alpha(alpha);
  const double e = poisson_mass(lambda, gamma);
  const double ll = std::log(lambda);
  const double log_s =
      log_series([&](double l) { return gamma * l + alpha * l * ll - alpha * std::lgamma(l + 1.0); });
  const double eg = std::exp(gamma);
  const double shift = conv == Convention::corrected ? lambda * (alpha + eg - 1.0)
                                                     : lambda * (alpha - eg + 1.0);
  return e / (1.0 - alpha) * (log_s - shift);
}

double poisson_chernoff(double lambda, double lambda2, double alpha, double gamma) {
  check_positive(lambda, "mean");
  check_positive(lambda2, "mean");
  check_alpha(alpha);
  return -std::exp(gamma) * std::pow(lambda, alpha) * std::pow(lambda2, 1.0 - alpha) + alpha * lambda +
         (1.0 - alpha) * lambda2 + lambda * std::expm1(gamma);
}

double poisson_bhattacharyya(double lambda, double lambda2, double gamma) {
  check_positive(lambda, "mean");
  check_positive(lambda2, "mean");
  return -std::exp(gamma) * std::sqrt(lambda * lambda2) + 0.5 * (lambda + lambda2) +
         lambda * std::expm1(gamma);
}

// --- scalar Gaussian -------------------------------------------------------

double gaussian_kl(double mu, double s2, double mu2, double s22, const WeightFunction& phi) {
  check_positive(s22, "variance");
  auto c = adjoint_coefficients(scalar_gaussian(phi), gaussian_theta(mu, s2));
  const double e0 = c.e0, e1 = c.e1(0), e2 = c.e2(0, 0);
  return e0 * (0.5 * std::log(s22 / s2) - 0.5 * (mu * mu / s2 - mu2 * mu2 / s22)) +
         (mu / s2 - mu2 / s22) * e1 - 0.5 * (1.0 / s2 - 1.0 / s22) * e2;
}

double gaussian_shannon(double mu, double s2, const WeightFunction& phi) {
  auto c = adjoint_coefficients(scalar_gaussian(phi), gaussian_theta(mu, s2));
  const double e0 = c.e0, e1 = c.e1(0), e2 = c.e2(0, 0);
  return e0 * 0.5 * (kLog2Pi + std::log(s2)) + 0.5 * (mu * mu * e0 - 2.0 * mu * e1 + e2) / s2;
}

double gaussian_renyi(double mu, double s2, double alpha, const WeightFunction& phi) {
  check_alpha(alpha);
  auto adj = scalar_gaussian(phi);
  const double e0 = adj.mass(gaussian_theta(mu, s2));
  return e0 / (1.0 - alpha) *
         (0.5 * (1.0 - alpha) * (kLog2Pi + std::log(s2)) - 0.5 * std::log(alpha) +
          gaussian_log_mass(adj, mu, s2 / alpha) - std::log(e0));
}

double gaussian_chernoff(double mu, double s2, double mu2, double s22, double alpha,
                         const WeightFunction& phi, Convention conv) {
  check_alpha(alpha);
  check_positive(s2, "variance");
  check_positive(s22, "variance");
  auto adj = scalar_gaussian(phi);
  const double sb2 = 1.0 / (alpha / s2 + (1.0 - alpha) / s22);
  const double mb = (alpha * mu / s2 + (1.0 - alpha) * mu2 / s22) * sb2;
  const double u = 0.5 * (alpha * std::log(s2) + (1.0 - alpha) * std::log(s22) - std::log(sb2)) +
                   0.5 * (alpha * mu * mu / s2 + (1.0 - alpha) * mu2 * mu2 / s22 - mb * mb / sb2);
  const double le = gaussian_log_mass(adj, mu, s2);
  const double lb = gaussian_log_mass(adj, mb, sb2);
  return conv == Convention::corrected ? u - lb + le : u - le + lb;
}

double gaussian_bhattacharyya(double mu, double s2, double mu2, double s22, const WeightFunction& phi,
                              Convention conv) {
  check_positive(s2, "variance");
  check_positive(s22, "variance");
  auto adj = scalar_gaussian(phi);
  const double sb2 = 2.0 * s2 * s22 / (s2 + s22);
  const double mb = 0.5 * (mu / s2 + mu2 / s22) * sb2;
  const double u = 0.25 * (std::log(s2) + std::log(s22)) - 0.5 * std::log(sb2) +
                   0.25 * (mu * mu / s2 + mu2 * mu2 / s22) - mb * mb / (2.0 * sb2);
  const double le = gaussian_log_mass(adj, mu, s2);
  const double lb = gaussian_log_mass(adj, mb, sb2);
  return conv == Convention::corrected ? u - lb + le : u + lb - le;
}

double gaussian_exp_mass(double mu, double s2, double gamma, Convention conv) {
  check_positive(s2, "variance");
  const double quad = gamma * gamma * s2;
  return std::exp(mu * gamma + (conv == Convention::corrected ? 0.5 * quad : quad));
}

double gaussian_exp_kl(double mu, double s2, double mu2, double s22, double gamma, Convention conv) {
  check_positive(s22, "variance");
  const double e0 = gaussian_exp_mass(mu, s2, gamma, conv);
  const double m1 = gamma * s2 + mu;
  const double second = s2 + m1 * m1;
  const double lin = mu / s2 - mu2 / s22;
  const double quad = 1.0 / s2 - 1.0 / s22;
  const double means = mu * mu / s2 - mu2 * mu2 / s22;
  if (conv == Convention::corrected)
    return e0 * (0.5 * std::log(s22 / s2) - 0.5 * means + lin * m1 - 0.5 * quad * second);
  return 0.5 * e0 *
         (std::log(s2 / s22) - means + lin * (gamma * std::sqrt(s2) + mu) - 0.5 * quad * second);
}

double gaussian_exp_shannon(double mu, double s2, double gamma, Convention conv) {
  return 0.5 * gaussian_exp_mass(mu, s2, gamma, conv) *
         (std::log(2.0 * std::numbers::pi * std::numbers::e * s2) + gamma * gamma * s2);
}

double gaussian_exp_renyi(double mu, double s2, double alpha, double gamma, Convention conv) {
  check_alpha(alpha);
  return 0.5 * gaussian_exp_mass(mu, s2, gamma, conv) *
         (kLog2Pi + std::log(s2) - std::log(alpha) / (1.0 - alpha) + gamma * gamma * s2 / alpha);
}

// --- multivariate Gaussian -------------------------------------------------

double mvn_kl(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2, const WeightFunction& phi,
              Convention conv) {
  check_same_dims(mu, s, mu2, s2);
  const auto d = static_cast<std::size_t>(mu.size());
  auto adj = mvn_adjoint(phi, d);
  auto c = adjoint_coefficients(adj, adj.base().natural(Distribution::mvn(mu, s)));
  auto a = mvn_parts(s), b = mvn_parts(s2);
  const double means = mu.dot(a.prec * mu) - mu2.dot(b.prec * mu2);
  const double lin = (a.prec * mu - b.prec * mu2).dot(c.e1);
  const double quad = ((a.prec - b.prec) * c.e2).trace();
  const double logdets = conv == Convention::corrected ? b.logdet - a.logdet : a.logdet - b.logdet;
  return 0.5 * c.e0 * (logdets - means) + lin - 0.5 * quad;
}

double mvn_shannon(const Vec& mu, const Mat& s, const WeightFunction& phi) {
  const auto d = static_cast<std::size_t>(mu.size());
  auto adj = mvn_adjoint(phi, d);
  auto c = adjoint_coefficients(adj, adj.base().natural(Distribution::mvn(mu, s)));
  auto a = mvn_parts(s);
  Mat centred = mu * mu.transpose() * c.e0 - mu * c.e1.transpose() - c.e1 * mu.transpose() + c.e2;
  return c.e0 * 0.5 * (static_cast<double>(d) * kLog2Pi + a.logdet) + 0.5 * (centred * a.prec).trace();
}

double mvn_renyi(const Vec& mu, const Mat& s, double alpha, const WeightFunction& phi, Convention conv) {
  check_alpha(alpha);
  const auto d = static_cast<std::size_t>(mu.size());
  auto adj = mvn_adjoint(phi, d);
  const double le = mvn_log_mass(adj, mu, s);
  const double la = mvn_log_mass(adj, mu, s / alpha);
  const double lnorm = static_cast<double>(d) * kLog2Pi + logdet(s);
  const double bracket = conv == Convention::corrected
                             ? 0.5 * (1.0 - alpha) * lnorm - 0.5 * static_cast<double>(d) * std::log(alpha)
                             : 0.5 * (1.0 - alpha) * 0.5 * lnorm - 0.5 * std::log(alpha);
  return std::exp(le) / (1.0 - alpha) * (bracket + la - le);
}

double mvn_chernoff(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2, double alpha,
                    const WeightFunction& phi, Convention conv) {
  check_alpha(alpha);
  check_same_dims(mu, s, mu2, s2);
  auto adj = mvn_adjoint(phi, static_cast<std::size_t>(mu.size()));
  auto a = mvn_parts(s), b = mvn_parts(s2);
  Mat prec_bar = alpha * a.prec + (1.0 - alpha) * b.prec;
  Mat sb = symmetrize(prec_bar.inverse());
  Vec mb = sb * (alpha * a.prec * mu + (1.0 - alpha) * b.prec * mu2);
  const double logdets = alpha * a.logdet + (1.0 - alpha) * b.logdet - logdet(sb);
  const double means =
      0.5 * (alpha * mu.dot(a.prec * mu) + (1.0 - alpha) * mu2.dot(b.prec * mu2) - mb.dot(prec_bar * mb));
  const double le = mvn_log_mass(adj, mu, s);
  const double lb = mvn_log_mass(adj, mb, sb);
  if (conv == Convention::corrected) return 0.5 * logdets + means - lb + le;
  return logdets + means - le + lb;
}

double mvn_bhattacharyya(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2,
                         const WeightFunction& phi, Convention conv) {
  check_same_dims(mu, s, mu2, s2);
  auto adj = mvn_adjoint(phi, static_cast<std::size_t>(mu.size()));
  auto a = mvn_parts(s), b = mvn_parts(s2);
  Mat sb = symmetrize(2.0 * (a.prec + b.prec).inverse());
  const double mean_factor = conv == Convention::corrected ? 0.5 : 2.0;
  Vec mb = mean_factor * sb * (a.prec * mu + b.prec * mu2);
  const double prec_form = mb.dot(0.5 * (a.prec + b.prec) * mb);
  const double means = 0.25 * (mu.dot(a.prec * mu) + mu2.dot(b.prec * mu2) - 2.0 * prec_form);
  const double le = mvn_log_mass(adj, mu, s);
  const double lb = mvn_log_mass(adj, mb, sb);
  if (conv == Convention::corrected)
    return 0.25 * (a.logdet + b.logdet) - 0.5 * logdet(sb) + means - lb + le;
  return 0.5 * (a.logdet + b.logdet) - logdet(sb) + means - le + lb;
}

double mvn_exp_mass(const Vec& mu, const Mat& s, const Vec& gamma) {
  if (gamma.size() != mu.size()) throw Error(ErrorKind::illegal_parameters, "gamma dimension differs");
  return std::exp(mu.dot(gamma) + 0.5 * gamma.dot(s * gamma));
}

double mvn_exp_kl(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2, const Vec& gamma,
                  Convention conv) {
  check_same_dims(mu, s, mu2, s2);
  const double e0 = mvn_exp_mass(mu, s, gamma);
  auto a = mvn_parts(s), b = mvn_parts(s2);
  Vec m1 = s * gamma + mu;
  Mat second = s + m1 * m1.transpose();
  const double means = mu.dot(a.prec * mu) - mu2.dot(b.prec * mu2);
  const double lin = (a.prec * mu - b.prec * mu2).dot(m1);
  const double quad = ((a.prec - b.prec) * second).trace();
  if (conv == Convention::corrected)
    return e0 * (0.5 * (b.logdet - a.logdet) - 0.5 * means + lin - 0.5 * quad);
  return 0.5 * e0 * (a.logdet - b.logdet - means + lin - 0.5 * quad);
}

double mvn_exp_shannon(const Vec& mu, const Mat& s, const Vec& gamma) {
  const double d = static_cast<double>(mu.size());
  return 0.5 * mvn_exp_mass(mu, s, gamma) *
         (d * std::log(2.0 * std::numbers::pi * std::numbers::e) + logdet(s) + gamma.dot(s * gamma));
}

double mvn_exp_renyi(const Vec& mu, const Mat& s, double alpha, const Vec& gamma) {
  check_alpha(alpha);
  const double d = static_cast<double>(mu.size());
  return 0.5 * mvn_exp_mass(mu, s, gamma) *
         (d * kLog2Pi + logdet(s) - d * std::log(alpha) / (1.0 - alpha) + gamma.dot(s * gamma) / alpha);
}

// --- Gamma -----------------------------------------------------------------

double gamma_kl(double lambda, double beta, double lambda2, double beta2, const WeightFunction& phi,
                Convention conv) {
  check_positive(lambda2, "shape");
  check_positive(beta2, "rate");
  auto adj = gamma_adjoint(phi);
  const Vec theta = gamma_theta(lambda, beta);
  const double e = adj.mass(theta);
  const Vec m = adj.weighted_statistic(theta);  // (int phi p x, int phi p ln x)
  const double logs = lambda * std::log(beta) - lambda2 * std::log(beta2) - std::lgamma(lambda) +
                      std::lgamma(lambda2);
  const double x_term = conv == Convention::corrected ? -(beta - beta2) * m(0) : (beta - beta2) * m(0);
  return e * logs + x_term + (lambda - lambda2) * m(1);
}

double gamma_shannon(double lambda, double beta, const WeightFunction& phi) {
  auto adj = gamma_adjoint(phi);
  auto c = adjoint_coefficients(adj, gamma_theta(lambda, beta));
  return c.e0 * gamma_F(lambda, beta) + *c.gamma_l;
}

double gamma_renyi(double lambda, double beta, double alpha, const WeightFunction& phi, Convention conv) {
  check_alpha(alpha);
  auto adj = gamma_adjoint(phi);
  const Vec theta = gamma_theta(lambda, beta);
  const double e = adj.mass(theta);
  const double ea = adj.mass(alpha * theta);
  const double scaled = conv == Convention::corrected ? gamma_F(alpha * (lambda - 1.0) + 1.0, alpha * beta)
                                                      : gamma_F(alpha * lambda, alpha * beta);
  return e / (1.0 - alpha) * (std::log(ea / e) + scaled - alpha * gamma_F(lambda, beta));
}

double gamma_chernoff(double lambda, double beta, double lambda2, double beta2, double alpha,
                      const WeightFunction& phi) {
  check_alpha(alpha);
  auto adj = gamma_adjoint(phi);
  const double lb = alpha * lambda + (1.0 - alpha) * lambda2;
  const double bb = alpha * beta + (1.0 - alpha) * beta2;
  return std::log(adj.mass(gamma_theta(lambda, beta))) - std::log(adj.mass(gamma_theta(lb, bb))) +
         alpha * gamma_F(lambda, beta) + (1.0 - alpha) * gamma_F(lambda2, beta2) - gamma_F(lb, bb);
}

double gamma_bhattacharyya(double lambda, double beta, double lambda2, double beta2,
                           const WeightFunction& phi) {
  auto adj = gamma_adjoint(phi);
  const double lb = 0.5 * (lambda + lambda2);
  const double bb = 0.5 * (beta + beta2);
  return std::log(adj.mass(gamma_theta(lambda, beta))) - std::log(adj.mass(gamma_theta(lb, bb))) +
         0.5 * (gamma_F(lambda, beta) + gamma_F(lambda2, beta2)) - gamma_F(lb, bb);
}

}  // namespace winfer::closed_form
