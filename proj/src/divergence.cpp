#include "winfer/divergence.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "winfer/error.hpp"

namespace winfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::invalid_argument, "alpha must lie in (0,1)");
}

DivergenceValue from(const Integral& r) { return {r.value, r.error, r.method}; }

DivergenceValue pair(const HypothesisProblem& prob, const PairIntegrand& h,
                     const IntegrationConfig& cfg) {
  prob.validate();
  return from(integrate_pair(prob.phi, prob.p, prob.q, h, cfg));
}

DivergenceValue mass_or_throw(const WeightFunction& phi, const Distribution& p,
                              const IntegrationConfig& cfg) {
  auto e = weighted_mass(phi, p, cfg);
  if (!(e.value > 0.0)) throw Error(ErrorKind::zero_weight_mass, "E_phi(p) = 0");
  return e;
}

// coeff - 1 where coeff = E_phi(p^a q^(1-a)) / E_phi(p), computed without
// cancellation near alpha = 1.
struct Coefficient {
  DivergenceValue mass;
  double minus_one;
  double error;
  Method method;
};

Coefficient coefficient(const HypothesisProblem& prob, double alpha, const IntegrationConfig& cfg) {
  check_alpha(alpha);
  auto mass = mass_or_throw(prob.phi, prob.p, cfg);
  auto d = pair(
      prob,
      [alpha](double lphi, double lp, double lq) {
        if (lp == kNegInf) return 0.0;
        const double t = (1.0 - alpha) * (lq - lp);
        if (std::abs(t) > 1.0) return std::exp(lphi + lp + t) - std::exp(lphi + lp);
        return std::exp(lphi + lp) * std::expm1(t);
      },
      cfg);
  const double m1 = d.value / mass.value;
  return {mass, m1, d.error / mass.value + std::abs(m1) * mass.error / mass.value, d.method};
}

}  // namespace

bool DivergenceValue::infinite() const { return std::isinf(value); }

DivergenceValue weighted_mass(const WeightFunction& phi, const Distribution& p,
                              const IntegrationConfig& cfg) {
  return from(integrate_single(phi, p, [](double lphi, double lp) { return std::exp(lphi + lp); }, cfg));
}

DivergenceValue weighted_tv(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  return pair(
      prob,
      [](double lphi, double lp, double lq) {
        return 0.5 * std::exp(lphi) * std::abs(std::exp(lp) - std::exp(lq));
      },
      cfg);
}

double weighted_tv_sup_oracle(const HypothesisProblem& prob) {
  prob.validate();
  const Support& s = prob.p.support();
  if (s.kind() != SupportKind::finite_alphabet)
    throw Error(ErrorKind::domain_mismatch, "sup oracle needs a finite alphabet");
  const std::size_t m = s.size();
  if (m > 20) throw Error(ErrorKind::alphabet_too_large, "sup oracle enumerates at most 2^20 subsets");
  std::vector<double> d(m);
  for (std::size_t i = 0; i < m; ++i)
    d[i] = prob.phi.on_alphabet(s, i) * (prob.p.pmf()[i] - prob.q.pmf()[i]);
  // Walk all subsets in Gray-code order, toggling one symbol at a time.
  double best_pq = 0.0, best_qp = 0.0;
  std::vector<bool> in(m, false);
  long double acc = 0.0L;
  for (std::uint64_t k = 1; k < (std::uint64_t{1} << m); ++k) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(k));
    in[bit] = !in[bit];
    acc += in[bit] ? d[bit] : -d[bit];
    best_pq = std::max(best_pq, static_cast<double>(acc));
    best_qp = std::max(best_qp, static_cast<double>(-acc));
  }
  return 0.5 * (best_pq + best_qp);
}

DivergenceValue delta(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  return pair(
      prob,
      [](double lphi, double lp, double lq) { return 0.5 * (std::exp(lphi + lp) + std::exp(lphi + lq)); },
      cfg);
}

DivergenceValue hellinger(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  auto r = pair(
      prob,
      [](double lphi, double lp, double lq) {
        const double d = std::exp(0.5 * lp) - std::exp(0.5 * lq);
        return 0.5 * std::exp(lphi) * d * d;
      },
      cfg);
  const double v = std::sqrt(std::max(0.0, r.value));
  return {v, v > 0 ? r.error / (2.0 * v) : std::sqrt(r.error), r.method};
}

DivergenceValue bhattacharyya_coeff(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  return pair(
      prob, [](double lphi, double lp, double lq) { return std::exp(lphi + 0.5 * (lp + lq)); }, cfg);
}

DivergenceValue kl(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  return pair(
      prob,
      [](double lphi, double lp, double lq) {
        if (lp == kNegInf) return 0.0;
        if (lq == kNegInf) return kInf;
        return std::exp(lphi + lp) * (lp - lq);
      },
      cfg);
}

DivergenceValue chernoff_coeff(const HypothesisProblem& prob, double alpha,
                               const IntegrationConfig& cfg) {
  auto c = coefficient(prob, alpha, cfg);
  return {1.0 + c.minus_one, c.error, c.method};
}

DivergenceValue chernoff_div(const HypothesisProblem& prob, double alpha,
                             const IntegrationConfig& cfg) {
  auto c = coefficient(prob, alpha, cfg);
  if (c.minus_one <= -1.0) return {kInf, 0.0, c.method};
  return {-std::log1p(c.minus_one), c.error / (1.0 + c.minus_one), c.method};
}

DivergenceValue renyi_div(const HypothesisProblem& prob, double alpha, const IntegrationConfig& cfg,
                          Convention conv) {
  if (alpha == 1.0) return kl(prob, cfg);
  auto c = coefficient(prob, alpha, cfg);
  const double sign = conv == Convention::corrected ? 1.0 : -1.0;
  const double pre = sign * c.mass.value / (alpha - 1.0);
  if (c.minus_one <= -1.0) return {sign * kInf, 0.0, c.method};
  return {pre * std::log1p(c.minus_one), std::abs(pre) * c.error / (1.0 + c.minus_one), c.method};
}

DivergenceValue tsallis_div(const HypothesisProblem& prob, double alpha, const IntegrationConfig& cfg,
                            Convention conv) {
  if (alpha == 1.0) return kl(prob, cfg);
  auto c = coefficient(prob, alpha, cfg);
  const double sign = conv == Convention::corrected ? 1.0 : -1.0;
  const double pre = sign * c.mass.value / (alpha - 1.0);
  return {pre * c.minus_one, std::abs(pre) * c.error, c.method};
}

DivergenceValue bhattacharyya_div(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  auto mass = mass_or_throw(prob.phi, prob.p, cfg);
  auto rho = bhattacharyya_coeff(prob, cfg);
  if (!(rho.value > 0.0)) return {kInf, 0.0, rho.method};
  return {-std::log(rho.value) + std::log(mass.value),
          rho.error / rho.value + mass.error / mass.value, rho.method};
}

DivergenceValue shannon_entropy(const Distribution& p, const WeightFunction& phi,
                                const IntegrationConfig& cfg) {
  phi.check_support(p.support());
  return from(integrate_single(
      phi, p,
      [](double lphi, double lp) { return lp == kNegInf ? 0.0 : -std::exp(lphi + lp) * lp; }, cfg));
}

DivergenceValue renyi_entropy(const Distribution& p, const WeightFunction& phi, double alpha,
                              const IntegrationConfig& cfg) {
  check_alpha(alpha);
  return renyi_entropy_ext(p, phi, alpha, 1.0, cfg);
}

DivergenceValue renyi_entropy_ext(const Distribution& p, const WeightFunction& phi, double alpha,
                                  double beta, const IntegrationConfig& cfg) {
  if (!(alpha > 0.0) || alpha == 1.0 || !(beta > 0.0) || !(alpha + beta > 1.0))
    throw Error(ErrorKind::invalid_argument, "need alpha > 0, alpha != 1, beta > 0, alpha + beta > 1");
  phi.check_support(p.support());
  auto mass = mass_or_throw(phi, p, cfg);
  auto den = integrate_single(
      phi, p,
      [beta](double lphi, double lp) { return lp == kNegInf ? 0.0 : std::exp(lphi + beta * lp); }, cfg);
  // E(p^(a+b-1)) - E(p^b) = E(p^b expm1((a-1) ln p))
  auto diff = integrate_single(
      phi, p,
      [alpha, beta](double lphi, double lp) {
        if (lp == kNegInf) return 0.0;
        const double t = (alpha - 1.0) * lp;
        // Deep tails: expm1 overflows while the prefactor underflows.
        if (std::abs(t) > 1.0) return std::exp(lphi + beta * lp + t) - std::exp(lphi + beta * lp);
        return std::exp(lphi + beta * lp) * std::expm1(t);
      },
      cfg);
  if (!(den.value > 0.0)) throw Error(ErrorKind::zero_weight_mass, "E_phi(p^beta) = 0");
  const double m1 = diff.value / den.value;
  const double pre = mass.value / (1.0 - alpha);
  if (m1 <= -1.0) throw Error(ErrorKind::evaluation_failure, "E_phi(p^(alpha+beta-1)) vanished");
  return {pre * std::log1p(m1),
          std::abs(pre) * (diff.error + std::abs(m1) * den.error) / den.value / (1.0 + m1) +
              std::abs(std::log1p(m1)) * mass.error / std::abs(1.0 - alpha),
          diff.method};
}

}  // namespace winfer
