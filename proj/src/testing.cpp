#include "winfer/testing.hpp"

#include <cmath>
#include <limits>

#include "winfer/error.hpp"

namespace winfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;

BoundCheck make_check(std::string name, double lhs, double rhs, double tol, bool applicable = true) {
  const bool holds = lhs <= rhs + tol * std::max(1.0, std::abs(rhs));
  return {std::move(name), lhs, rhs, applicable, holds};
}

const HypothesisProblem& finite_base(const ProductProblem& pp) {
  if (pp.n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  pp.base.validate();
  if (pp.base.p.support().kind() != SupportKind::finite_alphabet)
    throw Error(ErrorKind::domain_mismatch, "exact n-fold computation needs a finite alphabet");
  return pp.base;
}

double log_or_neg_inf(double v) { return v > 0 ? std::log(v) : kNegInf; }

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Calls visit(counts) for every composition of n into k nonnegative parts.
template <class Visit>
void for_each_composition(std::size_t n, std::size_t k, Visit&& visit) {
  std::vector<std::size_t> c(k, 0);
  if (k == 0) return;
  c[k - 1] = n;
  while (true) {
    visit(c);
    // Next composition in reverse-lexicographic order of the prefix.
    std::size_t i = k - 1;
    while (i > 0 && c[i] == 0) --i;
    if (i == 0) return;
    const std::size_t tail = c[i];
    c[i] = 0;
    c[i - 1] += 1;
    c[k - 1] = tail - 1;
  }
}

double composition_count(std::size_t n, std::size_t k) {
  if (k == 0) return 0.0;
  return std::round(std::exp(std::lgamma(double(n + k)) - std::lgamma(double(n + 1)) -
                             std::lgamma(double(k))));
}

double log_multinomial(std::size_t n, const std::vector<std::size_t>& c) {
  double r = std::lgamma(double(n) + 1.0);
  for (auto ci : c) r -= std::lgamma(double(ci) + 1.0);
  return r;
}

}  // namespace

DecisionRule DecisionRule::table(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "empty decision table");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::invalid_argument, "decision values must lie in [0,1]");
  DecisionRule r;
  r.values_ = std::move(values);
  return r;
}

DecisionRule DecisionRule::function(std::function<double(double)> fn) {
  DecisionRule r;
  r.fn_ = std::move(fn);
  return r;
}

DecisionRule DecisionRule::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0))
    throw Error(ErrorKind::invalid_argument, "decision values must lie in [0,1]");
  return function([value](double) { return value; });
}

double DecisionRule::operator()(double x) const {
  if (!values_.empty()) return values_.at(static_cast<std::size_t>(x));
  const double v = fn_(x);
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorKind::evaluation_failure, "decision rule left [0,1]");
  return v;
}

ErrorLosses error_losses(const HypothesisProblem& prob, const DecisionRule& rule,
                         const IntegrationConfig& cfg) {
  prob.validate();
  if (rule.is_table() && (prob.p.support().kind() != SupportKind::finite_alphabet ||
                          rule.values().size() != prob.p.support().size()))
    throw Error(ErrorKind::domain_mismatch, "decision table does not match the alphabet");
  auto a = integrate_pair_at(
      prob.phi, prob.p, prob.q,
      [&](double x, double lphi, double lp, double) { return std::exp(lphi + lp) * rule(x); }, cfg);
  auto b = integrate_pair_at(
      prob.phi, prob.p, prob.q,
      [&](double x, double lphi, double, double lq) { return std::exp(lphi + lq) * (1.0 - rule(x)); },
      cfg);
  return {a.value, b.value};
}

DecisionRule optimal_rule(const HypothesisProblem& prob) {
  prob.validate();
  if (prob.p.support().kind() == SupportKind::finite_alphabet) {
    std::vector<double> d(prob.p.support().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = prob.q.pmf()[i] > prob.p.pmf()[i] ? 1.0 : 0.0;
    return DecisionRule::table(std::move(d));
  }
  if (prob.p.support().kind() == SupportKind::real_vector)
    throw Error(ErrorKind::domain_mismatch, "scalar decision rules only");
  Distribution p = prob.p, q = prob.q;
  return DecisionRule::function(
      [p, q](double x) { return q.log_density(x) > p.log_density(x) ? 1.0 : 0.0; });
}

DivergenceValue min_total_error(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  auto d = delta(prob, cfg);
  auto t = weighted_tv(prob, cfg);
  return {d.value - t.value, d.error + t.error, d.method};
}

const BoundCheck& BoundReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorKind::invalid_argument, "no bound check named " + name);
}

BoundReport error_bound_report(const HypothesisProblem& prob, const IntegrationConfig& cfg, double tol) {
  BoundReport r;
  r.mass_p = weighted_mass(prob.phi, prob.p, cfg).value;
  r.mass_q = weighted_mass(prob.phi, prob.q, cfg).value;
  r.delta = delta(prob, cfg).value;
  r.tau = weighted_tv(prob, cfg).value;
  r.rho = bhattacharyya_coeff(prob, cfg).value;
  r.eta = hellinger(prob, cfg).value;
  r.kl = kl(prob, cfg).value;
  r.min_total_error = r.delta - r.tau;
  const double d2r2 = std::max(0.0, r.delta * r.delta - r.rho * r.rho);
  r.lower_quadratic = r.delta > 0 ? r.rho * r.rho / (2.0 * r.delta) : 0.0;
  r.lower_sqrt = r.delta - std::sqrt(d2r2);
  const bool finite_kl = std::isfinite(r.kl);
  r.pinsker = finite_kl ? std::sqrt(std::max(0.0, r.kl) / 2.0) * std::sqrt(r.mass_p) : kInf;
  const double bh_sq = r.delta * r.delta - (finite_kl ? std::exp(-r.kl) : 0.0);
  r.bretagnolle_huber = bh_sq >= 0 ? std::sqrt(bh_sq) : std::numeric_limits<double>::quiet_NaN();
  const double tilt_sq =
      r.delta * r.delta -
      (finite_kl && r.mass_p > 0 ? r.mass_p * r.mass_p * std::exp(-r.kl / r.mass_p) : 0.0);
  r.bretagnolle_huber_tilted = std::sqrt(std::max(0.0, tilt_sq));

  auto& c = r.checks;
  c.push_back(make_check("chain:0<=delta-rho", 0.0, r.delta - r.rho, tol));
  c.push_back(make_check("chain:delta-rho<=tau", r.delta - r.rho, r.tau, tol));
  c.push_back(make_check("chain:tau<=sqrt(delta^2-rho^2)", r.tau, std::sqrt(d2r2), tol));
  c.push_back(make_check("chain:rho^2/(2delta)<=delta-sqrt(delta^2-rho^2)", r.lower_quadratic,
                         r.lower_sqrt, tol));
  c.push_back(make_check("chain:delta-sqrt(delta^2-rho^2)<=min-total-error", r.lower_sqrt,
                         r.min_total_error, tol));
  c.push_back(make_check("chain:min-total-error<=rho", r.min_total_error, r.rho, tol));
  c.push_back(make_check("pinsker", r.tau, r.pinsker, tol, r.mass_p >= r.mass_q && finite_kl));
  c.push_back(make_check("gibbs", 0.0, r.kl, tol, r.mass_p >= r.mass_q));
  // Squared form avoids the square root of a negative number.
  c.push_back(make_check("bretagnolle-huber", r.tau * r.tau + (finite_kl ? std::exp(-r.kl) : 0.0),
                         r.delta * r.delta, tol, finite_kl));
  c.push_back(make_check("bretagnolle-huber-tilted",
                         r.tau * r.tau + r.mass_p * r.mass_p * std::exp(-r.kl / r.mass_p),
                         r.delta * r.delta, tol, finite_kl && r.mass_p > 0));
  c.push_back(make_check("bretagnolle-huber-when-mass>=1",
                         r.tau * r.tau + (finite_kl ? std::exp(-r.kl) : 0.0), r.delta * r.delta, tol,
                         finite_kl && r.mass_p >= 1.0 && r.kl >= 0.0));
  return r;
}

double nfold_min_total_error_product(const ProductProblem& pp) {
  const auto& base = finite_base(pp);
  const Support& s = base.p.support();
  const std::size_t m = s.size(), n = pp.n;
  if (std::pow(double(m), double(n)) > 1e7)
    throw Error(ErrorKind::product_too_large, "m^n exceeds 1e7 outcomes");
  std::vector<double> lp(m), lq(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double lw = log_or_neg_inf(base.phi.on_alphabet(s, i));
    lp[i] = lw + base.p.log_density(double(i));
    lq[i] = lw + base.q.log_density(double(i));
  }
  // Odometer over tuples with prefix sums of the log densities.
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> sp(n + 1, 0.0), sq(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) sp[k + 1] = sp[k] + lp[0], sq[k + 1] = sq[k] + lq[0];
  NeumaierSum sum;
  while (true) {
    sum.add(std::exp(std::min(sp[n], sq[n])));
    std::size_t k = n;
    while (k > 0 && ++idx[k - 1] == m) idx[--k] = 0;
    if (k == 0) break;
    for (std::size_t j = k - 1; j < n; ++j) {
      sp[j + 1] = sp[j] + lp[idx[j]];
      sq[j + 1] = sq[j] + lq[idx[j]];
    }
  }
  return sum.value();
}

double nfold_min_total_error_compositions(const ProductProblem& pp) {
  const auto& base = finite_base(pp);
  const Support& s = base.p.support();
  std::vector<double> lp, lq;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lw = log_or_neg_inf(base.phi.on_alphabet(s, i));
    if (lw == kNegInf) continue;
    lp.push_back(lw + base.p.log_density(double(i)));
    lq.push_back(lw + base.q.log_density(double(i)));
  }
  if (composition_count(pp.n, lp.size()) > 1e6)
    throw Error(ErrorKind::enumeration_too_large, "more than 1e6 compositions");
  NeumaierSum sum;
  for_each_composition(pp.n, lp.size(), [&](const std::vector<std::size_t>& c) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0) continue;
      a += double(c[i]) * lp[i];
      b += double(c[i]) * lq[i];
    }
    sum.add(std::exp(log_multinomial(pp.n, c) + std::min(a, b)));
  });
  return sum.value();
}

NFoldBounds nfold_error_bounds(const ProductProblem& pp, const IntegrationConfig& cfg,
                               const NFoldOptions& opt) {
  if (pp.n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  const auto& prob = pp.base;
  const double n = double(pp.n);
  const double ep = weighted_mass(prob.phi, prob.p, cfg).value;
  const double eq = weighted_mass(prob.phi, prob.q, cfg).value;
  const double rho = bhattacharyya_coeff(prob, cfg).value;
  const double dl = delta(prob, cfg).value;
  const double tau = weighted_tv(prob, cfg).value;
  const double eta = hellinger(prob, cfg).value;
  const double k = kl(prob, cfg).value;
  NFoldBounds b;
  b.n = pp.n;
  b.lower = std::exp(2.0 * n * std::log(rho) - std::log(std::pow(ep, n) + std::pow(eq, n)));
  b.upper = std::pow(rho, n);
  b.upper_divergence = rho > 0 ? std::pow(ep, n) * std::exp(-n * (std::log(ep) - std::log(rho))) : 0.0;
  b.upper_tv = std::pow(std::max(0.0, dl * dl - tau * tau), n / 2.0);
  if (dl <= 1.0) b.hellinger_bound = std::exp(-n * eta * eta);
  b.asymptotic_lower = (1.0 - opt.epsilon) / (2.0 * dl) * std::exp(-n * std::pow(ep, n - 1.0) * k);
  b.asymptotic_applicable = ep >= 1.0 && pp.n >= opt.n0 && std::isfinite(k);

  if (prob.p.support().kind() == SupportKind::finite_alphabet) {
    const double m = double(prob.p.support().size());
    try {
      if (std::pow(m, n) <= 1e7) {
        b.exact = nfold_min_total_error_product(pp);
        b.exact_method = "product";
      } else {
        b.exact = nfold_min_total_error_compositions(pp);
        b.exact_method = "compositions";
      }
    } catch (const Error& e) {
      b.exact_method = e.what();
    }
  } else {
    b.exact_method = "not available on continuous supports";
  }

  auto& c = b.checks;
  const double t = opt.tol;
  c.push_back(make_check("upper<=upper-tv", b.upper, b.upper_tv, t));
  c.push_back(make_check("upper=upper-divergence", std::abs(b.upper - b.upper_divergence), 0.0,
                         1e-10 * std::max(1.0, b.upper)));
  if (b.exact) {
    c.push_back(make_check("lower<=exact", b.lower, *b.exact, t));
    c.push_back(make_check("exact<=upper", *b.exact, b.upper, t));
    if (b.hellinger_bound) c.push_back(make_check("exact<=exp(-n eta^2)", *b.exact, *b.hellinger_bound, t));
    c.push_back(make_check("asymptotic-lower<=exact", b.asymptotic_lower, *b.exact, t,
                           b.asymptotic_applicable));
  }
  if (b.hellinger_bound) c.push_back(make_check("upper<=exp(-n eta^2)", b.upper, *b.hellinger_bound, t));
  return b;
}

double stein_sanov_limit(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  const double ep = weighted_mass(prob.phi, prob.p, cfg).value;
  if (!(ep > 0)) throw Error(ErrorKind::zero_weight_mass, "E_phi(p) = 0");
  const double k = kl(prob, cfg).value;
  if (!std::isfinite(k)) throw Error(ErrorKind::infinite_kl, "K(p||q) is infinite");
  return std::log(ep) - k / ep;
}

SteinSanovEstimate stein_sanov_empirical(const ProductProblem& pp, double eta,
                                         const SteinSanovOptions& opt, const IntegrationConfig& cfg) {
  if (!(eta > 0)) throw Error(ErrorKind::invalid_argument, "eta must be > 0");
  if (pp.n < 1) throw Error(ErrorKind::invalid_argument, "n must be >= 1");
  const auto& prob = pp.base;
  prob.validate();
  const double n = double(pp.n);
  const Support& s = prob.p.support();
  const bool finite = s.kind() == SupportKind::finite_alphabet;

  if (finite) {
    // Symbols carrying tilted mass: phi > 0 and p > 0.
    std::vector<double> lpi, z;
    double ep = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) ep += prob.phi.on_alphabet(s, i) * prob.p.pmf()[i];
    if (!(ep > 0)) throw Error(ErrorKind::zero_weight_mass, "E_phi(p) = 0");
    double centre = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double w = prob.phi.on_alphabet(s, i), pi = prob.p.pmf()[i], qi = prob.q.pmf()[i];
      if (w <= 0 || pi <= 0) continue;
      if (qi <= 0) throw Error(ErrorKind::infinite_kl, "K(p||q) is infinite");
      lpi.push_back(std::log(w * pi / ep));
      z.push_back(std::log(pi) - std::log(qi));
      centre += w * pi / ep * z.back();
    }
    const double lo = n * (centre - eta), hi = n * (centre + eta);
    if (opt.method == SteinSanovMethod::exact_enumeration) {
      if (composition_count(pp.n, lpi.size()) > 1e6)
        throw Error(ErrorKind::enumeration_too_large, "more than 1e6 compositions");
      double log_beta = kNegInf, log_out = kNegInf;
      for_each_composition(pp.n, lpi.size(), [&](const std::vector<std::size_t>& c) {
        double lt = log_multinomial(pp.n, c), S = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (c[i] == 0) continue;
          lt += double(c[i]) * lpi[i];
          S += double(c[i]) * z[i];
        }
        if (S >= lo && S <= hi)
          log_beta = log_add(log_beta, lt - S);
        else
          log_out = log_add(log_out, lt);
      });
      return {std::log(ep) + log_beta / n, std::exp(log_out), 0.0, Method::exact_sum};
    }
    std::vector<double> cdf;
    double acc = 0.0;
    for (double l : lpi) cdf.push_back(acc += std::exp(l));
    auto est = mc_means(opt.samples, opt.seed, 2, [&](Rng& rng, std::span<double> out) {
      double S = 0.0;
      for (std::size_t k = 0; k < pp.n; ++k) S += z[rng.categorical(cdf)];
      const bool in = S >= lo && S <= hi;
      out[0] = in ? std::exp(n * centre - S) : 0.0;
      out[1] = in ? 0.0 : 1.0;
    });
    const double m = est.mean[0];
    return {std::log(ep) - centre + std::log(m) / n, est.mean[1],
            m > 0 ? est.std_error[0] / (m * n) : kInf, Method::monte_carlo};
  }

  if (opt.method == SteinSanovMethod::exact_enumeration)
    throw Error(ErrorKind::invalid_argument, "exact enumeration needs a finite alphabet");
  if (!prob.p.has_sampler()) throw Error(ErrorKind::no_sampler, "p has no sampler");
  const double ep = weighted_mass(prob.phi, prob.p, cfg).value;
  const double k = kl(prob, cfg).value;
  if (!std::isfinite(k)) throw Error(ErrorKind::infinite_kl, "K(p||q) is infinite");
  const double centre = k / ep, lep = std::log(ep);
  const double lo = n * (centre - eta), hi = n * (centre + eta);
  // Draws from p^n reweighted by phi^(n) / E_phi(p)^n give the tilted law.
  auto est = mc_means(opt.samples, opt.seed, 2, [&](Rng& rng, std::span<double> out) {
    double S = 0.0, lw = 0.0;
    for (std::size_t i = 0; i < pp.n; ++i) {
      const double x = prob.p.draw(rng);
      lw += prob.phi.log_value(x) - lep;
      S += prob.p.log_density(x) - prob.q.log_density(x);
    }
    const bool in = S >= lo && S <= hi;
    out[0] = in ? std::exp(lw + n * centre - S) : 0.0;
    out[1] = in ? 0.0 : std::exp(lw);
  });
  const double m = est.mean[0];
  return {lep - centre + std::log(m) / n, est.mean[1], m > 0 ? est.std_error[0] / (m * n) : kInf,
          Method::monte_carlo};
}

double TiltedPair::z(double x) const { return p_.log_density(x) - q_.log_density(x); }

TiltedPair make_tilted_pair(const HypothesisProblem& prob, const IntegrationConfig& cfg) {
  prob.validate();
  TiltedPair t;
  t.p_ = prob.p;
  t.q_ = prob.q;
  t.mass_p = weighted_mass(prob.phi, prob.p, cfg).value;
  t.mass_q = weighted_mass(prob.phi, prob.q, cfg).value;
  if (!(t.mass_p > 0 && t.mass_q > 0)) throw Error(ErrorKind::zero_weight_mass, "zero weighted mass");
  const double kpq = kl(prob, cfg).value;
  const double kqp = kl({prob.q, prob.p, prob.phi}, cfg).value;
  t.mean_pi = kpq / t.mass_p;
  t.mean_theta = -kqp / t.mass_q;
  const Support& s = prob.p.support();
  if (s.kind() == SupportKind::finite_alphabet) {
    std::vector<double> a(s.size()), b(s.size());
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double w = prob.phi.on_alphabet(s, i);
      sa += (a[i] = w * prob.p.pmf()[i] / t.mass_p);
      sb += (b[i] = w * prob.q.pmf()[i] / t.mass_q);
    }
    // Absorb the last rounding so the pmfs pass the 1e-12 check.
    for (auto& v : a) v /= sa;
    for (auto& v : b) v /= sb;
    t.pi = Distribution::finite(a, s);
    t.theta = Distribution::finite(b, s);
    return t;
  }
  if (s.kind() == SupportKind::real_vector)
    throw Error(ErrorKind::domain_mismatch, "tilted pairs are built for scalar supports");
  const WeightFunction phi = prob.phi;
  const Distribution p = prob.p, q = prob.q;
  const double lmp = std::log(t.mass_p), lmq = std::log(t.mass_q);
  t.pi = Distribution::custom(s, [=](double x) { return phi.log_value(x) + p.log_density(x) - lmp; },
                              p.center(), p.scale());
  t.theta = Distribution::custom(s, [=](double x) { return phi.log_value(x) + q.log_density(x) - lmq; },
                                 q.center(), q.scale());
  return t;
}

}  // namespace winfer
