#include "winfer/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "winfer/catalog.hpp"
#include "winfer/error.hpp"
#include "winfer/estimation.hpp"
#include "winfer/expfam.hpp"
#include "winfer/instances.hpp"
#include "winfer/random.hpp"
#include "winfer/testing.hpp"

namespace winfer::verify {

namespace {

namespace cf = winfer::closed_form;
using namespace winfer::instances;

constexpr double kTvTol = 1e-12;
constexpr double kBregmanTol = 1e-8;
constexpr double kGoldenTol = 1e-7;
constexpr double kMinOrder = 0.9;
constexpr const char* kFailure = "numerical-failure";

std::string describe(const HypothesisProblem& pr) {
  std::ostringstream os;
  const auto& s = pr.p.support();
  if (s.kind() == SupportKind::finite_alphabet)
    os << "finite m=" << s.size();
  else if (pr.p.tag())
    os << pr.p.tag()->name;
  else
    os << "continuous";
  os << " phi=" << pr.phi.describe();
  return os.str();
}

Row compare_le(std::size_t i, std::string check, std::string detail, double lhs, double rhs, bool pass,
               bool applicable = true) {
  return {i, std::move(check), std::move(detail), lhs, rhs, rhs - lhs, applicable, pass};
}

// |a - b| / max(floor, |b|) <= tol, reported with margin tol - gap.
Row compare_eq(std::size_t i, std::string check, std::string detail, double a, double b, double tol,
               double floor = 1.0) {
  const double gap = std::abs(a - b) / std::max(floor, std::abs(b));
  const bool ok = std::isfinite(gap) ? gap <= tol : a == b;
  return {i, std::move(check), std::move(detail), a, b, tol - gap, true, ok};
}

HypothesisProblem chain_instance(Rng& rng, std::size_t i) {
  if (i % 10 == 9) return random_continuous_problem(rng, static_cast<int>(i / 10));
  const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform() * 9);
  return random_finite_problem(rng, m);
}

double chain_tol(const HypothesisProblem& pr) { return pr.p.support().kind() == SupportKind::finite_alphabet ? 1e-12 : 1e-9; }

std::vector<Row> tv_oracle(std::size_t i, Rng& rng, Convention) {
  const std::size_t m = 1 + std::min<std::size_t>(11, static_cast<std::size_t>(rng.uniform() * 12));
  const auto pr = random_finite_problem(rng, m);
  const double tv = weighted_tv(pr).value, oracle = weighted_tv_sup_oracle(pr);
  const double gap = std::abs(tv - oracle);
  return {Row{i, "tv=sup-oracle", describe(pr), tv, oracle, kTvTol - gap, true, gap <= kTvTol}};
}

std::vector<Row> report_rows(std::size_t i, Rng& rng, const std::function<bool(const std::string&)>& keep) {
  const auto pr = chain_instance(rng, i);
  const auto rep = error_bound_report(pr, {}, chain_tol(pr));
  std::vector<Row> rows;
  for (const auto& c : rep.checks)
    if (keep(c.name)) rows.push_back(compare_le(i, c.name, describe(pr), c.lhs, c.rhs, c.holds, c.applicable));
  return rows;
}

std::vector<Row> chain(std::size_t i, Rng& rng, Convention) {
  return report_rows(i, rng, [](const std::string& n) { return n.rfind("chain:", 0) == 0; });
}

std::vector<Row> pinsker(std::size_t i, Rng& rng, Convention) {
  return report_rows(i, rng, [](const std::string& n) { return n == "pinsker"; });
}

std::vector<Row> bretagnolle_huber(std::size_t i, Rng& rng, Convention conv) {
  if (conv == Convention::as_printed)
    return report_rows(i, rng, [](const std::string& n) { return n == "bretagnolle-huber"; });
  return report_rows(i, rng, [](const std::string& n) {
    return n == "bretagnolle-huber-tilted" || n == "bretagnolle-huber-when-mass>=1";
  });
}

std::vector<Row> nfold(std::size_t i, Rng& rng, Convention) {
  const auto pr = random_finite_problem(rng, 2);
  const std::size_t n = 2 + i % 11;
  const auto b = nfold_error_bounds({pr, n});
  std::vector<Row> rows;
  const std::string detail = describe(pr) + " n=" + std::to_string(n) + " exact=" + b.exact_method;
  for (const auto& c : b.checks) {
    if (c.name == "upper=upper-divergence")
      rows.push_back(compare_eq(i, c.name, detail, b.upper, b.upper_divergence, 1e-10));
    else
      rows.push_back(compare_le(i, c.name, detail, c.lhs, c.rhs, c.holds, c.applicable));
  }
  return rows;
}

HypothesisProblem pair_of(const ExpfamDraw& d) {
  return {d.family.member(d.theta), d.family.member(d.theta2), d.phi};
}

std::string describe(const ExpfamDraw& d) { return d.family.name() + " phi=" + d.phi.describe(); }

std::vector<Row> bregman_kl(std::size_t i, Rng& rng, Convention) {
  const auto d = random_expfam_draw(rng, static_cast<int>(i));
  const AdjointFamily adj(d.family, d.phi);
  return {compare_eq(i, "bregman=kl", describe(d), weighted_bregman(adj, d.theta2, d.theta), kl(pair_of(d)).value,
                     kBregmanTol, 1e-3)};
}

std::vector<Row> kl_expansion(std::size_t i, Rng& rng, Convention conv) {
  const auto d = random_expfam_draw(rng, static_cast<int>(i));
  const auto model = ParametricModel::natural(d.family);
  const std::size_t l = i % model.dim();
  const auto rep = kl_expansion_check(model, d.phi, d.theta, l, {}, {}, conv);
  const std::string detail = describe(d) + " coordinate=" + std::to_string(l);
  return {compare_le(i, "first-quotient-order", detail, kMinOrder, rep.first_order, rep.first_order >= kMinOrder),
          compare_le(i, "second-quotient-order", detail, kMinOrder, rep.second_order,
                     rep.second_order >= kMinOrder)};
}

// Closed forms against the divergence module (quadrature or series).
std::vector<Row> expfam_golden(std::size_t i, Rng& rng, Convention conv) {
  std::vector<Row> rows;
  const double a = 0.6, c = 0.3;  // entropy and Chernoff orders
  auto add = [&](const std::string& name, const std::string& detail, double closed, double numeric) {
    rows.push_back(compare_eq(i, name, detail, closed, numeric, kGoldenTol));
  };
  const double u = rng.uniform();
  switch (i % 5) {
    case 0: {
      const double l = log_uniform(rng, 0.5, 3), l2 = log_uniform(rng, 0.5, 3);
      const WeightFunction w = u < 0.4   ? WeightFunction::exponential(0.8 * std::min(l, l2) * (rng.uniform() - 0.5))
                               : u < 0.7 ? WeightFunction::polynomial({log_uniform(rng, 0.1, 1), 1.0},
                                                                      Support::half_line(0))
                                         : WeightFunction::absolute();
      const HypothesisProblem pr{Distribution::exponential(l), Distribution::exponential(l2), w};
      const std::string det = describe(pr);
      add("exponential:kl", det, cf::exponential_kl(l, l2, w), kl(pr).value);
      add("exponential:shannon", det, cf::exponential_shannon(l, w), shannon_entropy(pr.p, w).value);
      add("exponential:renyi", det, cf::exponential_renyi(l, a, w), renyi_entropy(pr.p, w, a).value);
      add("exponential:chernoff", det, cf::exponential_chernoff(l, l2, c, w), chernoff_div(pr, c).value);
      add("exponential:bhattacharyya", det, cf::exponential_bhattacharyya(l, l2, w), bhattacharyya_div(pr).value);
      break;
    }
    case 1: {
      const double l = log_uniform(rng, 0.3, 5), l2 = log_uniform(rng, 0.3, 5), g = -0.5 + rng.uniform();
      const WeightFunction w = WeightFunction::exponential(g);
      const HypothesisProblem pr{Distribution::poisson(l), Distribution::poisson(l2), w};
      const std::string det = describe(pr);
      add("poisson:mass", det, cf::poisson_mass(l, g), weighted_mass(w, pr.p).value);
      add("poisson:kl", det, cf::poisson_kl(l, l2, g), kl(pr).value);
      add("poisson:shannon", det, cf::poisson_shannon(l, g), shannon_entropy(pr.p, w).value);
      add("poisson:renyi", det, cf::poisson_renyi(l, a, g, conv), renyi_entropy(pr.p, w, a).value);
      add("poisson:chernoff", det, cf::poisson_chernoff(l, l2, c, g), chernoff_div(pr, c).value);
      add("poisson:bhattacharyya", det, cf::poisson_bhattacharyya(l, l2, g), bhattacharyya_div(pr).value);
      break;
    }
    case 2: {
      const double m = -1 + 2 * rng.uniform(), s = log_uniform(rng, 0.5, 2);
      const double m2 = -1 + 2 * rng.uniform(), s2 = log_uniform(rng, 0.5, 2);
      const double g = -0.6 + 1.2 * rng.uniform();
      const WeightFunction w = u < 0.5   ? WeightFunction::exponential(g)
                               : u < 0.8 ? WeightFunction::polynomial({1.0, 0.5, 1.0}, Support::real_line())
                                         : WeightFunction::absolute();
      const HypothesisProblem pr{Distribution::normal(m, s), Distribution::normal(m2, s2), w};
      const std::string det = describe(pr);
      const double k = kl(pr).value, h = shannon_entropy(pr.p, w).value, r = renyi_entropy(pr.p, w, a).value;
      add("gaussian:kl", det, cf::gaussian_kl(m, s, m2, s2, w), k);
      add("gaussian:shannon", det, cf::gaussian_shannon(m, s, w), h);
      add("gaussian:renyi", det, cf::gaussian_renyi(m, s, a, w), r);
      add("gaussian:chernoff", det, cf::gaussian_chernoff(m, s, m2, s2, c, w, conv), chernoff_div(pr, c).value);
      add("gaussian:bhattacharyya", det, cf::gaussian_bhattacharyya(m, s, m2, s2, w, conv),
          bhattacharyya_div(pr).value);
      if (w.kind() == WeightFunction::Kind::exponential) {
        add("gaussian-exp:mass", det, cf::gaussian_exp_mass(m, s, g, conv), weighted_mass(w, pr.p).value);
        add("gaussian-exp:kl", det, cf::gaussian_exp_kl(m, s, m2, s2, g, conv), k);
        add("gaussian-exp:shannon", det, cf::gaussian_exp_shannon(m, s, g, conv), h);
        add("gaussian-exp:renyi", det, cf::gaussian_exp_renyi(m, s, a, g, conv), r);
      }
      break;
    }
    case 3: {
      const int dim = 2 + static_cast<int>(i / 5) % 2;
      auto draw = [&] {
        Mat f = Mat::Identity(dim, dim);
        for (int r = 0; r < dim; ++r)
          for (int q = 0; q <= r; ++q) f(r, q) = r == q ? 0.8 + 0.6 * rng.uniform() : 0.3 * (rng.uniform() - 0.5);
        Vec mean(dim);
        for (int r = 0; r < dim; ++r) mean(r) = rng.uniform() - 0.5;
        return std::pair<Vec, Mat>{mean, f * f.transpose()};
      };
      auto [m, s] = draw();
      auto [m2, s2] = draw();
      Vec g(dim);
      for (int r = 0; r < dim; ++r) g(r) = 0.5 * (rng.uniform() - 0.5);
      const WeightFunction w = WeightFunction::exponential(std::vector<double>(g.data(), g.data() + dim));
      const HypothesisProblem pr{Distribution::mvn(m, s), Distribution::mvn(m2, s2), w};
      const std::string det = describe(pr) + " d=" + std::to_string(dim);
      const double k = kl(pr).value, h = shannon_entropy(pr.p, w).value, r = renyi_entropy(pr.p, w, a).value;
      add("mvn:mass", det, cf::mvn_exp_mass(m, s, g), weighted_mass(w, pr.p).value);
      add("mvn:kl", det, cf::mvn_kl(m, s, m2, s2, w, conv), k);
      add("mvn-exp:kl", det, cf::mvn_exp_kl(m, s, m2, s2, g, conv), k);
      add("mvn:shannon", det, cf::mvn_shannon(m, s, w), h);
      add("mvn-exp:shannon", det, cf::mvn_exp_shannon(m, s, g), h);
      add("mvn:renyi", det, cf::mvn_renyi(m, s, a, w, conv), r);
      add("mvn-exp:renyi", det, cf::mvn_exp_renyi(m, s, a, g), r);
      add("mvn:chernoff", det, cf::mvn_chernoff(m, s, m2, s2, c, w, conv), chernoff_div(pr, c).value);
      add("mvn:bhattacharyya", det, cf::mvn_bhattacharyya(m, s, m2, s2, w, conv), bhattacharyya_div(pr).value);
      break;
    }
    default: {
      const double l = log_uniform(rng, 1, 4), b = log_uniform(rng, 0.5, 2);
      const double l2 = log_uniform(rng, 1, 4), b2 = log_uniform(rng, 0.5, 2);
      const WeightFunction w = u < 0.3   ? WeightFunction()
                               : u < 0.7 ? WeightFunction::exponential(0.3 * std::min(b, b2) * (2 * rng.uniform() - 1))
                                         : WeightFunction::polynomial({log_uniform(rng, 0.1, 1), log_uniform(rng, 0.1, 1)},
                                                                      Support::half_line(0));
      const HypothesisProblem pr{Distribution::gamma(l, b), Distribution::gamma(l2, b2), w};
      const std::string det = describe(pr);
      add("gamma:kl", det, cf::gamma_kl(l, b, l2, b2, w, conv), kl(pr).value);
      add("gamma:shannon", det, cf::gamma_shannon(l, b, w), shannon_entropy(pr.p, w).value);
      add("gamma:renyi", det, cf::gamma_renyi(l, b, a, w, conv), renyi_entropy(pr.p, w, a).value);
      add("gamma:chernoff", det, cf::gamma_chernoff(l, b, l2, b2, c, w), chernoff_div(pr, c).value);
      add("gamma:bhattacharyya", det, cf::gamma_bhattacharyya(l, b, l2, b2, w), bhattacharyya_div(pr).value);
      break;
    }
  }
  return rows;
}

using SuiteFn = std::vector<Row> (*)(std::size_t, Rng&, Convention);

const std::map<std::string, std::pair<SuiteFn, std::string>>& registry() {
  static const std::map<std::string, std::pair<SuiteFn, std::string>> r{
      {"tv-oracle", {tv_oracle, "max-abs-gap"}},
      {"chain", {chain, "min-margin"}},
      {"pinsker", {pinsker, "min-margin"}},
      {"bretagnolle-huber", {bretagnolle_huber, "min-margin"}},
      {"nfold", {nfold, "min-margin"}},
      {"bregman-kl", {bregman_kl, "max-relative-gap"}},
      {"kl-expansion", {kl_expansion, "min-order"}},
      {"expfam-golden", {expfam_golden, "max-relative-gap"}},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"tv-oracle", "chain",      "pinsker",      "bretagnolle-huber",
                                              "nfold",     "bregman-kl", "kl-expansion", "expfam-golden"};
  return names;
}

SuiteResult run_suite(const std::string& suite, std::size_t instances, std::uint64_t seed, Convention conv) {
  const auto it = registry().find(suite);
  if (it == registry().end()) throw Error(ErrorKind::invalid_argument, "unknown suite '" + suite + "'");
  const auto [fn, summary_name] = it->second;

  std::vector<std::vector<Row>> per(instances);
  const Rng master(seed);
  parallel_for(instances, [&](std::size_t i) {
    Rng rng = master.split(i);
    try {
      per[i] = fn(i, rng, conv);
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      per[i] = {Row{i, kFailure, std::string(to_string(e.kind())) + ": " + e.what(), nan, nan, nan, true, false}};
    }
  });

  SuiteResult res;
  res.suite = suite;
  res.instances = instances;
  res.seed = seed;
  res.summary_name = summary_name;
  const bool gap = summary_name == "max-abs-gap" || summary_name == "max-relative-gap";
  const double tol = suite == "tv-oracle" ? kTvTol : suite == "bregman-kl" ? kBregmanTol : kGoldenTol;
  res.summary = gap ? 0.0 : std::numeric_limits<double>::infinity();
  for (auto& rows : per)
    for (auto& r : rows) {
      if (r.check == kFailure) {
        ++res.failures;
      } else if (!r.applicable) {
        ++res.skipped;
      } else {
        ++res.checked;
        if (!r.pass) ++res.violations;
        if (gap)
          res.summary = std::max(res.summary, tol - r.margin);
        else if (summary_name == "min-order")
          res.summary = std::min(res.summary, r.rhs);
        else
          res.summary = std::min(res.summary, r.margin);
      }
      res.rows.push_back(std::move(r));
    }
  return res;
}

}  // namespace winfer::verify
