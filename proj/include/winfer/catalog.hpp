#pragma once

#include "winfer/divergence.hpp"
#include "winfer/expfam.hpp"

// Closed-form weighted divergences and entropies for the catalog families,
// in conventional parameters. Where a published form differs from the
// correct one, Convention::as_printed evaluates it literally; the default is
// the corrected form. Weight-dependent coefficients (E_phi, int phi p x, ...)
// come from AdjointFamily, so they are closed form for constant and
// exponential weights.
namespace winfer::closed_form {

// Exponential(lambda); phi must have a Laplace transform at the rates used.
double exponential_kl(double lambda, double lambda2, const WeightFunction& phi);
double exponential_shannon(double lambda, const WeightFunction& phi);
double exponential_renyi(double lambda, double alpha, const WeightFunction& phi);
double exponential_chernoff(double lambda, double lambda2, double alpha, const WeightFunction& phi);
double exponential_bhattacharyya(double lambda, double lambda2, const WeightFunction& phi);

// Poisson(lambda) with phi(l) = e^{gamma l}.
double poisson_mass(double lambda, double gamma);
double poisson_kl(double lambda, double lambda2, double gamma);
double poisson_shannon(double lambda, double gamma);
// The printed form has -lambda(alpha - e^gamma + 1) in place of
// -lambda(alpha + e^gamma - 1).
double poisson_renyi(double lambda, double alpha, double gamma,
                     Convention conv = Convention::corrected);
double poisson_chernoff(double lambda, double lambda2, double alpha, double gamma);
double poisson_bhattacharyya(double lambda, double lambda2, double gamma);

// Scalar Gaussian N(mu, s2), any weight.
double gaussian_kl(double mu, double s2, double mu2, double s22, const WeightFunction& phi);
double gaussian_shannon(double mu, double s2, const WeightFunction& phi);
double gaussian_renyi(double mu, double s2, double alpha, const WeightFunction& phi);
// The printed forms add ln E_phi(theta_alpha) and subtract ln E_phi(theta).
double gaussian_chernoff(double mu, double s2, double mu2, double s22, double alpha,
                         const WeightFunction& phi, Convention conv = Convention::corrected);
double gaussian_bhattacharyya(double mu, double s2, double mu2, double s22, const WeightFunction& phi,
                              Convention conv = Convention::corrected);

// Scalar Gaussian with phi(x) = e^{gamma x}. The printed mass is
// e^{mu gamma + gamma^2 s2} (no 1/2) and the printed KL also differs inside
// the bracket.
double gaussian_exp_mass(double mu, double s2, double gamma, Convention conv = Convention::corrected);
double gaussian_exp_kl(double mu, double s2, double mu2, double s22, double gamma,
                       Convention conv = Convention::corrected);
double gaussian_exp_shannon(double mu, double s2, double gamma, Convention conv = Convention::corrected);
double gaussian_exp_renyi(double mu, double s2, double alpha, double gamma,
                          Convention conv = Convention::corrected);

// Multivariate Gaussian N(mu, S), any weight (quadrature for weights other
// than constant and e^{x . gamma}).
double mvn_kl(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2, const WeightFunction& phi,
              Convention conv = Convention::corrected);
double mvn_shannon(const Vec& mu, const Mat& s, const WeightFunction& phi);
double mvn_renyi(const Vec& mu, const Mat& s, double alpha, const WeightFunction& phi,
                 Convention conv = Convention::corrected);
double mvn_chernoff(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2, double alpha,
                    const WeightFunction& phi, Convention conv = Convention::corrected);
double mvn_bhattacharyya(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2,
                         const WeightFunction& phi, Convention conv = Convention::corrected);

// Multivariate Gaussian with phi(x) = e^{x . gamma}.
double mvn_exp_mass(const Vec& mu, const Mat& s, const Vec& gamma);
double mvn_exp_kl(const Vec& mu, const Mat& s, const Vec& mu2, const Mat& s2, const Vec& gamma,
                  Convention conv = Convention::corrected);
double mvn_exp_shannon(const Vec& mu, const Mat& s, const Vec& gamma);
double mvn_exp_renyi(const Vec& mu, const Mat& s, double alpha, const Vec& gamma);

// Gamma(shape lambda, rate beta), any weight.
double gamma_kl(double lambda, double beta, double lambda2, double beta2, const WeightFunction& phi,
                Convention conv = Convention::corrected);
double gamma_shannon(double lambda, double beta, const WeightFunction& phi);
// The printed form uses Gamma(alpha lambda)/(alpha beta)^{alpha lambda} where
// the member at alpha theta has shape alpha(lambda - 1) + 1.
double gamma_renyi(double lambda, double beta, double alpha, const WeightFunction& phi,
                   Convention conv = Convention::corrected);
double gamma_chernoff(double lambda, double beta, double lambda2, double beta2, double alpha,
                      const WeightFunction& phi);
double gamma_bhattacharyya(double lambda, double beta, double lambda2, double beta2,
                           const WeightFunction& phi);

}  // namespace winfer::closed_form
