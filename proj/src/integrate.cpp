#include "winfer/integrate.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "winfer/error.hpp"

namespace winfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTailPanels = 60;

struct Panel {
  double a, b;
  double value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

double checked(double v) {
  if (std::isnan(v)) throw Error(ErrorKind::evaluation_failure, "integrand returned NaN");
  if (!std::isfinite(v)) throw Error(ErrorKind::evaluation_failure, "integrand is not finite");
  return v;
}

Panel kronrod21(const ScalarFn& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double f0 = checked(f(mid));
  double kr = f0 * wk[0], ga = 0.0, l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fp = checked(f(mid + half * xk[i]));
    const double fm = checked(f(mid - half * xk[i]));
    kr += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 1) ga += (fp + fm) * wg[i / 2];
  }
  Panel p{a, b, kr * half, std::abs(kr - ga) * half, l1 * std::abs(half)};
  return p;
}

Integral adaptive(const ScalarFn& f, const std::vector<std::pair<double, double>>& pieces,
                  const IntegrationConfig& cfg) {
  std::priority_queue<Panel> heap;
  std::vector<Panel> done;
  for (auto [a, b] : pieces)
    if (b > a) heap.push(kronrod21(f, a, b));
  std::size_t splits = 0;
  auto totals = [&] {
    NeumaierSum v, e, l;
    for (const auto& p : done) v.add(p.value), e.add(p.error), l.add(p.l1);
    auto copy = heap;
    while (!copy.empty()) {
      const auto& p = copy.top();
      v.add(p.value), e.add(p.error), l.add(p.l1);
      copy.pop();
    }
    return std::array<double, 3>{v.value(), e.value(), l.value()};
  };
  while (true) {
    auto [value, error, l1] = totals();
    const double tol = std::max({cfg.abs_tol, cfg.rel_tol * std::abs(value), 50.0 * kEps * l1});
    if (error <= tol || heap.empty()) {
      if (error > tol)
        throw Error(ErrorKind::non_convergent_integral, "quadrature cannot resolve the integrand");
      return {value, error, Method::quadrature};
    }
    if (splits >= cfg.max_subdivisions) {
      std::ostringstream os;
      os << "subdivision budget exhausted (estimate " << value << ", error " << error << ")";
      throw Error(ErrorKind::non_convergent_integral, os.str());
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      done.push_back(worst);
      continue;
    }
    heap.push(kronrod21(f, worst.a, mid));
    heap.push(kronrod21(f, mid, worst.b));
    ++splits;
  }
}

// Adds panels beyond `edge` (direction +1 or -1) until two consecutive panels
// carry less than tail_mass_bound of the mass seen so far.
void add_tail(const ScalarFn& f, double edge, int direction, double scale, double core_l1,
              const IntegrationConfig& cfg, std::vector<std::pair<double, double>>& pieces) {
  double x = edge, w = scale, l1 = core_l1;
  int quiet = 0;
  for (int k = 0; k < kMaxTailPanels; ++k) {
    const double y = x + direction * w;
    Panel p = direction > 0 ? kronrod21(f, x, y) : kronrod21(f, y, x);
    pieces.emplace_back(std::min(x, y), std::max(x, y));
    quiet = p.l1 <= cfg.tail_mass_bound * l1 ? quiet + 1 : 0;
    l1 += p.l1;
    if (quiet >= 2) return;
    x = y;
    w *= 2.0;
  }
  throw Error(ErrorKind::non_convergent_integral, "tail mass does not decay on an unbounded domain");
}

Integral lattice_sum(const ScalarFn& f, const IntegrationConfig& cfg, const ScalarHint& hint) {
  const double start = std::max(0.0, std::floor(hint.lo));
  NeumaierSum sum;
  double l1 = 0.0;
  for (double k = start - 1; k >= 0; --k) {
    const double t = checked(f(k));
    sum.add(t);
    l1 += std::abs(t);
  }
  constexpr double kMaxTerms = 1e7;
  int quiet = 0;
  const double past = std::max(start, std::ceil(hint.hi));
  for (double k = start; k < start + kMaxTerms; ++k) {
    const double t = checked(f(k));
    sum.add(t);
    l1 += std::abs(t);
    if (k > past) {
      quiet = std::abs(t) <= cfg.tail_mass_bound * l1 ? quiet + 1 : 0;
      if (quiet >= 5) return {sum.value(), kEps * l1 + cfg.tail_mass_bound * l1, Method::exact_sum};
    }
  }
  throw Error(ErrorKind::non_convergent_integral, "lattice series does not converge");
}

}  // namespace

void IntegrationConfig::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0) || !(tail_mass_bound > 0))
    throw Error(ErrorKind::invalid_argument, "integration tolerances must be > 0");
  if (max_subdivisions < 1) throw Error(ErrorKind::invalid_argument, "max-subdivisions must be >= 1");
  if (mc_samples < 1) throw Error(ErrorKind::invalid_argument, "mc-samples must be >= 1");
  if (hermite_nodes < 4) throw Error(ErrorKind::invalid_argument, "hermite-nodes must be >= 4");
  if (lower && upper && !(*lower < *upper))
    throw Error(ErrorKind::invalid_argument, "truncation bounds must satisfy lower < upper");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::quadrature: return "quadrature";
    case Method::exact_sum: return "exact-sum";
    case Method::monte_carlo: return "monte-carlo";
  }
  return "?";
}

void NeumaierSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

Integral integrate_interval(const ScalarFn& f, double a, double b, const IntegrationConfig& cfg) {
  cfg.validate();
  if (a == b) return {0.0, 0.0, Method::quadrature};
  if (a > b) {
    Integral r = integrate_interval(f, b, a, cfg);
    r.value = -r.value;
    return r;
  }
  return adaptive(f, {{a, b}}, cfg);
}

Integral integrate(const ScalarFn& f, const Support& support, const IntegrationConfig& cfg,
                   const ScalarHint& hint) {
  cfg.validate();
  switch (support.kind()) {
    case SupportKind::finite_alphabet: {
      NeumaierSum s;
      double l1 = 0.0;
      for (std::size_t i = 0; i < support.size(); ++i) {
        const double t = checked(f(static_cast<double>(i)));
        s.add(t);
        l1 += std::abs(t);
      }
      return {s.value(), 2.0 * kEps * l1, Method::exact_sum};
    }
    case SupportKind::nonneg_integers: return lattice_sum(f, cfg, hint);
    case SupportKind::real_vector:
      throw Error(ErrorKind::domain_mismatch, "vector support needs a vector integrand");
    default: break;
  }
  const bool half = support.kind() == SupportKind::half_line;
  const double floor_x = half ? support.lower() : -kInf;
  const double s = hint.scale > 0 ? hint.scale : 1.0;
  if (cfg.lower || cfg.upper) {
    double a = std::max(cfg.lower.value_or(floor_x), floor_x);
    double b = cfg.upper.value_or(kInf);
    if (!std::isfinite(a) || !std::isfinite(b))
      throw Error(ErrorKind::invalid_argument, "explicit truncation needs both bounds on this support");
    return adaptive(f, {{a, b}}, cfg);
  }
  double a = std::max(floor_x, hint.lo - 8.0 * s);
  double b = std::max(hint.hi + 8.0 * s, a + 8.0 * s);
  Panel core = kronrod21(f, a, b);
  std::vector<std::pair<double, double>> pieces{{a, b}};
  add_tail(f, b, +1, s, core.l1, cfg, pieces);
  if (!half) add_tail(f, a, -1, s, core.l1, cfg, pieces);
  return adaptive(f, pieces, cfg);
}

void gauss_hermite(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  Mat j = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k) / 2.0);
    j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
    j(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(j);
  nodes.resize(n);
  weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    nodes[i] = es.eigenvalues()(ii);
    const double v = es.eigenvectors()(0, ii);
    weights[i] = std::sqrt(std::numbers::pi) * v * v;
  }
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  Mat j = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double b = kk / std::sqrt(4.0 * kk * kk - 1.0);
    j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) = b;
    j(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(j);
  nodes.resize(n);
  weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    nodes[i] = es.eigenvalues()(ii);
    const double v = es.eigenvectors()(0, ii);
    weights[i] = 2.0 * v * v;
  }
}

namespace {

double hermite_tensor(const VectorFn& f, std::size_t d, std::size_t n, const Vec& mean,
                      const Mat& lscaled) {
  std::vector<double> x, w;
  gauss_hermite(n, x, w);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> point(d);
  Vec z(static_cast<Eigen::Index>(d));
  NeumaierSum sum;
  while (true) {
    double weight = 1.0, z2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      z(static_cast<Eigen::Index>(k)) = x[idx[k]];
      weight *= w[idx[k]];
      z2 += x[idx[k]] * x[idx[k]];
    }
    Vec pt = mean + lscaled * z;
    for (std::size_t k = 0; k < d; ++k) point[k] = pt(static_cast<Eigen::Index>(k));
    const double v = checked(f(point));
    if (v != 0.0) sum.add(weight * std::exp(z2) * v);
    std::size_t k = 0;
    while (k < d && ++idx[k] == n) idx[k++] = 0;
    if (k == d) break;
  }
  return sum.value();
}

}  // namespace

Integral integrate(const VectorFn& f, const Support& support, const IntegrationConfig& cfg,
                   const VectorHint& hint) {
  cfg.validate();
  if (support.kind() != SupportKind::real_vector)
    return integrate([&](double x) { return f(std::span<const double>(&x, 1)); }, support, cfg,
                     ScalarHint{});
  const std::size_t d = support.dim();
  if (static_cast<std::size_t>(hint.mean.size()) != d)
    throw Error(ErrorKind::domain_mismatch, "reference Gaussian dimension differs from support");
  auto llt = checked_cholesky(hint.cov);
  Mat l = llt.matrixL();
  if (d <= 3) {
    Mat ls = std::sqrt(2.0) * l;
    const double jac = ls.determinant();
    // Raise the node count until two successive rules agree.
    std::size_t n = cfg.hermite_nodes;
    double coarse = jac * hermite_tensor(f, d, n * 3 / 4, hint.mean, ls);
    double fine = jac * hermite_tensor(f, d, n, hint.mean, ls);
    for (int refine = 0; refine < 3; ++refine) {
      if (std::abs(fine - coarse) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(fine))) break;
      n += cfg.hermite_nodes / 2;
      coarse = fine;
      fine = jac * hermite_tensor(f, d, n, hint.mean, ls);
    }
    return {fine, std::abs(fine - coarse), Method::quadrature};
  }
  double logdet = 0.0;
  for (std::size_t i = 0; i < d; ++i) logdet += 2.0 * std::log(l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
  const double norm = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + logdet);
  auto est = mc_means(cfg.mc_samples, cfg.mc_seed, 1, [&](Rng& rng, std::span<double> out) {
    Vec z(static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) z(static_cast<Eigen::Index>(k)) = rng.normal();
    Vec pt = hint.mean + l * z;
    std::vector<double> point(pt.data(), pt.data() + d);
    out[0] = checked(f(point)) * std::exp(-norm + 0.5 * z.squaredNorm());
  });
  return {est.mean[0], est.std_error[0], Method::monte_carlo};
}

Integral weighted_expectation(const WeightFunction& phi, const ScalarFn& g, const Support& support,
                              const IntegrationConfig& cfg, const ScalarHint& hint) {
  phi.check_support(support);
  if (support.kind() == SupportKind::finite_alphabet) {
    return integrate(
        [&](double i) {
          const double w = phi.on_alphabet(support, static_cast<std::size_t>(i));
          return w == 0.0 ? 0.0 : w * g(i);
        },
        support, cfg, hint);
  }
  return integrate(
      [&](double x) {
        const double w = phi(x);
        return w == 0.0 ? 0.0 : w * g(x);
      },
      support, cfg, hint);
}

void check_problem_support(const WeightFunction& phi, const Distribution& p, const Distribution& q) {
  if (!(p.support() == q.support()))
    throw Error(ErrorKind::domain_mismatch, "p and q live on different supports");
  phi.check_support(p.support());
}

namespace {

ScalarHint pair_hint(const WeightFunction& phi, const Distribution& p, const Distribution& q) {
  ScalarHint h;
  h.lo = std::min(p.center(), q.center());
  h.hi = std::max(p.center(), q.center());
  h.scale = std::max(p.scale(), q.scale());
  if (phi.kind() == WeightFunction::Kind::exponential && phi.gamma_vector().size() == 1) {
    const double shift = phi.gamma() * h.scale * h.scale;
    (shift > 0 ? h.hi : h.lo) += shift;
  } else if (phi.kind() == WeightFunction::Kind::polynomial) {
    h.hi += static_cast<double>(phi.coefficients().size() - 1) * h.scale;
  } else if (phi.kind() == WeightFunction::Kind::absolute) {
    h.hi += h.scale;
  }
  return h;
}

VectorHint pair_vector_hint(const WeightFunction& phi, const Distribution& p, const Distribution& q) {
  if (!p.tag() || !q.tag() || p.tag()->mean.size() == 0 || q.tag()->mean.size() == 0)
    throw Error(ErrorKind::domain_mismatch,
                "vector quadrature needs Gaussian-tagged distributions for its reference measure");
  const Vec& mp = p.tag()->mean;
  const Vec& mq = q.tag()->mean;
  Vec diff = mq - mp;
  VectorHint h;
  h.cov = p.tag()->cov + q.tag()->cov + 0.25 * diff * diff.transpose();
  h.mean = 0.5 * (mp + mq);
  if (phi.kind() == WeightFunction::Kind::exponential) {
    const auto& g = phi.gamma_vector();
    Vec gv = g.size() == 1 ? Vec(Vec::Constant(mp.size(), g[0]))
                           : Vec(Eigen::Map<const Vec>(g.data(), static_cast<Eigen::Index>(g.size())));
    h.mean += 0.5 * (p.tag()->cov + q.tag()->cov) * gv;
  }
  return h;
}

}  // namespace

Integral integrate_pair_at(const WeightFunction& phi, const Distribution& p, const Distribution& q,
                           const PointPairIntegrand& h, const IntegrationConfig& cfg) {
  check_problem_support(phi, p, q);
  const Support& s = p.support();
  bool infinite = false;
  auto eval = [&](double x, double lphi, double lp, double lq) {
    if (lphi == -kInf) return 0.0;
    const double v = h(x, lphi, lp, lq);
    if (std::isnan(v)) throw Error(ErrorKind::evaluation_failure, "pair integrand returned NaN");
    if (v == kInf) {
      infinite = true;
      return 0.0;
    }
    return v;
  };
  Integral r;
  if (s.kind() == SupportKind::real_vector) {
    r = integrate(
        [&](std::span<const double> x) {
          return eval(x[0], phi.log_at(x), p.log_density(x), q.log_density(x));
        },
        s, cfg, pair_vector_hint(phi, p, q));
  } else if (s.kind() == SupportKind::finite_alphabet) {
    r = integrate(
        [&](double i) {
          const double w = phi.on_alphabet(s, static_cast<std::size_t>(i));
          return eval(i, w > 0 ? std::log(w) : -kInf, p.log_density(i), q.log_density(i));
        },
        s, cfg);
  } else {
    r = integrate(
        [&](double x) { return eval(x, phi.log_value(x), p.log_density(x), q.log_density(x)); }, s,
        cfg, pair_hint(phi, p, q));
  }
  if (infinite) return {kInf, 0.0, r.method};
  return r;
}

Integral integrate_pair(const WeightFunction& phi, const Distribution& p, const Distribution& q,
                        const PairIntegrand& h, const IntegrationConfig& cfg) {
  return integrate_pair_at(
      phi, p, q, [&](double, double lphi, double lp, double lq) { return h(lphi, lp, lq); }, cfg);
}

Integral integrate_single(const WeightFunction& phi, const Distribution& p,
                          const std::function<double(double, double)>& h,
                          const IntegrationConfig& cfg) {
  return integrate_pair(phi, p, p, [&](double lphi, double lp, double) { return h(lphi, lp); }, cfg);
}

Integral integrate_weighted(const WeightFunction& phi, const Distribution& p, const PointIntegrand& h,
                            const IntegrationConfig& cfg) {
  phi.check_support(p.support());
  const Support& s = p.support();
  auto eval = [&](std::span<const double> x, double lphi, double lp) {
    if (lphi == -kInf || lp == -kInf) return 0.0;
    const double v = h(x, lphi, lp);
    if (std::isnan(v)) throw Error(ErrorKind::evaluation_failure, "integrand returned NaN");
    return v;
  };
  if (s.kind() == SupportKind::real_vector)
    return integrate(
        [&](std::span<const double> x) { return eval(x, phi.log_at(x), p.log_density(x)); }, s,
        cfg, pair_vector_hint(phi, p, p));
  if (s.kind() == SupportKind::finite_alphabet)
    return integrate(
        [&](double i) {
          const double w = phi.on_alphabet(s, static_cast<std::size_t>(i));
          return eval(std::span<const double>(&i, 1), w > 0 ? std::log(w) : -kInf, p.log_density(i));
        },
        s, cfg);
  return integrate(
      [&](double x) { return eval(std::span<const double>(&x, 1), phi.log_value(x), p.log_density(x)); },
      s, cfg, pair_hint(phi, p, p));
}

}  // namespace winfer
