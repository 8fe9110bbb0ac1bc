// winfer: weighted divergences, bound verification sweeps, Stein-Sanov rates
// and weighted Cramer-Rao / van Trees experiments.
//
// Exit codes: 0 ok, 1 usage or schema error, 2 numerical failure, NaN or a
// violated check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "problem_spec.hpp"
#include "winfer/error.hpp"
#include "winfer/estimation.hpp"
#include "winfer/testing.hpp"
#include "winfer/verify.hpp"

using namespace winfer;
using namespace winfer::cli;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { ok = 0, usage = 1, numerical = 2 };

struct Globals {
  bool as_printed = false;
  bool reproducible = false;
  Convention convention() const { return as_printed ? Convention::as_printed : Convention::corrected; }
};

// Non-finite values are written as strings; NaN also marks the run failed.
struct Writer {
  bool saw_nan = false;

  json num(double v) {
    if (std::isnan(v)) {
      saw_nan = true;
      return "nan";
    }
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  }
};

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json metadata(const Globals& g, const std::string& command, const json& inputs, std::uint64_t seed) {
  json m;
  m["tool"] = "winfer";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["convention"] = g.as_printed ? "as-printed" : "corrected";
  m["config_hash"] = fnv1a(command + (g.as_printed ? "|printed|" : "|corrected|") + inputs.dump());
  if (!g.reproducible) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    m["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  }
  return m;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw SchemaError("cannot write '" + out + "'");
  f << text;
}

json failure(const Error& e) { return {{"kind", to_string(e.kind())}, {"message", e.what()}}; }

// ---- compute ---------------------------------------------------------------

DivergenceValue numeric_value(const std::string& q, const ProblemSpec& s, double alpha, Convention conv) {
  const auto& cfg = s.integration;
  const Distribution& p = s.distributions[0];
  if (!quantity_needs_pair(q)) {
    if (q == "mass") return weighted_mass(s.weight, p, cfg);
    if (q == "shannon") return shannon_entropy(p, s.weight, cfg);
    if (q == "renyi-entropy") return renyi_entropy(p, s.weight, alpha, cfg);
    return renyi_entropy_ext(p, s.weight, alpha, s.beta, cfg);
  }
  const HypothesisProblem pr{p, s.distributions[1], s.weight};
  if (q == "tv") return weighted_tv(pr, cfg);
  if (q == "tv-oracle") return {weighted_tv_sup_oracle(pr), 0.0, Method::exact_sum};
  if (q == "delta") return delta(pr, cfg);
  if (q == "hellinger") return hellinger(pr, cfg);
  if (q == "bhattacharyya-coeff") return bhattacharyya_coeff(pr, cfg);
  if (q == "bhattacharyya") return bhattacharyya_div(pr, cfg);
  if (q == "kl") return kl(pr, cfg);
  if (q == "chernoff-coeff") return chernoff_coeff(pr, alpha, cfg);
  if (q == "chernoff") return chernoff_div(pr, alpha, cfg);
  if (q == "renyi") return renyi_div(pr, alpha, cfg, conv);
  if (q == "tsallis") return tsallis_div(pr, alpha, cfg, conv);
  if (q == "min-total-error") return min_total_error(pr, cfg);
  throw SchemaError("quantity '" + q + "' has no scalar value");
}

// One value, the primary and the cross-check. With --as-printed a printed
// closed form takes the primary slot.
json value_record(const std::string& q, const ProblemSpec& s, double alpha, const Globals& g, Writer& w) {
  const DivergenceValue v = numeric_value(q, s, alpha, g.convention());
  const auto closed = closed_form_value(q, s, alpha, g.convention());
  json r;
  if (closed && g.as_printed) {
    r["value"] = w.num(*closed);
    r["error"] = 0.0;
    r["method"] = "closed-form";
    r["numerical"] = {{"value", w.num(v.value)}, {"error", w.num(v.error)}, {"method", to_string(v.method)}};
  } else {
    r["value"] = w.num(v.value);
    r["error"] = w.num(v.error);
    r["method"] = to_string(v.method);
    if (closed) {
      const double gap = std::abs(*closed - v.value) / std::max(1.0, std::abs(v.value));
      r["closed_form"] = {{"value", w.num(*closed)}, {"relative_gap", w.num(gap)}};
    }
  }
  return r;
}

json bounds_record(const ProblemSpec& s, Writer& w) {
  const BoundReport rep = error_bound_report({s.distributions[0], s.distributions[1], s.weight}, s.integration, 1e-9);
  json checks = json::array();
  int passed = 0, failed = 0;
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"lhs", w.num(c.lhs)}, {"rhs", w.num(c.rhs)}, {"applicable", c.applicable},
                      {"holds", c.holds}});
    if (c.applicable) (c.holds ? passed : failed)++;
  }
  return {{"method", "bound-report"}, {"checks", checks}, {"passed", passed}, {"failed", failed}};
}

int cmd_compute(const Globals& g, const std::string& spec_path, const std::string& out) {
  const json input = read_json_file(spec_path);
  ProblemSpec spec;
  try {
    spec = parse_problem(input);
  } catch (const Error& e) {
    throw SchemaError(std::string("spec: ") + e.what());
  }
  Writer w;
  bool failed = false;
  json records = json::array();
  for (const auto& q : spec.quantities) {
    json r;
    r["name"] = q;
    try {
      if (q == "bounds") {
        r.update(bounds_record(spec, w));
      } else if (quantity_takes_alpha(q)) {
        json grid = json::array();
        for (double a : spec.alpha) {
          json row = value_record(q, spec, a, g, w);
          row["alpha"] = a;
          grid.push_back(row);
        }
        r["grid"] = grid;
        if (q == "renyi-entropy-ext") r["beta"] = spec.beta;
      } else {
        r.update(value_record(q, spec, 0.0, g, w));
      }
    } catch (const Error& e) {
      r["failure"] = failure(e);
      failed = true;
    }
    records.push_back(r);
  }
  json report{{"schema", 1},
              {"metadata", metadata(g, "compute", input, spec.seed)},
              {"records", records}};
  failed = failed || w.saw_nan;
  report["status"] = failed ? "numerical-failure" : "ok";
  emit(report.dump(2) + "\n", out);
  if (w.saw_nan) std::cerr << "winfer: NaN in report\n";
  return failed ? numerical : ok;
}

// ---- verify ----------------------------------------------------------------

int cmd_verify(const Globals& g, const std::string& suite, std::size_t instances, std::uint64_t seed,
               const std::string& out, const std::string& csv) {
  const auto& names = verify::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    throw SchemaError("unknown suite '" + suite + "'");
  const verify::SuiteResult res = verify::run_suite(suite, instances, seed, g.convention());
  Writer w;
  json rows = json::array();
  for (const auto& r : res.rows)
    rows.push_back({{"instance", r.instance},
                    {"check", r.check},
                    {"detail", r.detail},
                    {"lhs", w.num(r.lhs)},
                    {"rhs", w.num(r.rhs)},
                    {"margin", w.num(r.margin)},
                    {"applicable", r.applicable},
                    {"pass", r.pass}});
  w.saw_nan = false;  // failure rows carry NaN sides by design; counted below
  const json inputs{{"suite", suite}, {"instances", instances}, {"seed", seed}};
  json report{{"schema", 1},
              {"metadata", metadata(g, "verify", inputs, seed)},
              {"suite", suite},
              {"instances", instances},
              {"checked", res.checked},
              {"violations", res.violations},
              {"skipped", res.skipped},
              {"failures", res.failures},
              {"summary", {{"name", res.summary_name}, {"value", w.num(res.summary)}}},
              {"rows", rows}};
  const bool clean = res.violations == 0 && res.failures == 0 && !w.saw_nan;
  report["status"] = clean ? "ok" : "violations";
  emit(report.dump(2) + "\n", out);
  if (!csv.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "instance,check,lhs,rhs,margin,applicable,pass\n";
    for (const auto& r : res.rows)
      os << r.instance << ',' << r.check << ',' << r.lhs << ',' << r.rhs << ',' << r.margin << ','
         << (r.applicable ? 1 : 0) << ',' << (r.pass ? 1 : 0) << '\n';
    emit(os.str(), csv);
  }
  std::cerr << "winfer verify " << suite << ": " << res.checked << " checks, " << res.violations << " violations, "
            << res.failures << " numerical failures, " << res.summary_name << " = " << res.summary << "\n";
  return clean ? ok : numerical;
}

// ---- steinsanov ------------------------------------------------------------

std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::size_t> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long n = std::stoll(item, &used);
      if (used != item.size() || n < 1) throw std::invalid_argument(item);
      v.push_back(static_cast<std::size_t>(n));
    } catch (const std::exception&) {
      throw SchemaError("--n-list: '" + item + "' is not a positive integer");
    }
  }
  if (v.empty()) throw SchemaError("--n-list is empty");
  return v;
}

int cmd_steinsanov(const std::string& spec_path, const std::string& n_list, double eta, const std::string& method,
                   std::size_t samples, std::uint64_t seed, const std::string& out) {
  if (method != "exact" && method != "mc") throw SchemaError("--method must be exact or mc");
  const json input = read_json_file(spec_path);
  ProblemSpec spec;
  try {
    spec = parse_problem(input);
  } catch (const Error& e) {
    throw SchemaError(std::string("spec: ") + e.what());
  }
  if (spec.distributions.size() != 2) throw SchemaError("steinsanov needs two distributions");
  const auto ns = parse_n_list(n_list);
  const HypothesisProblem pr{spec.distributions[0], spec.distributions[1], spec.weight};

  SteinSanovOptions opt;
  opt.method = method == "exact" ? SteinSanovMethod::exact_enumeration : SteinSanovMethod::monte_carlo;
  opt.samples = samples;
  opt.seed = seed;
  const double limit = stein_sanov_limit(pr, spec.integration);

  std::ostringstream os;
  os.precision(17);
  os << "n,rate,limit,gap,type1_level,rate_std_error\n";
  bool monotone = true, nan = false;
  double prev = INFINITY;
  for (std::size_t n : ns) {
    const auto e = stein_sanov_empirical({pr, n}, eta, opt, spec.integration);
    const double gap = std::abs(e.rate - limit);
    nan = nan || std::isnan(gap);
    monotone = monotone && gap <= prev;
    prev = gap;
    os << n << ',' << e.rate << ',' << limit << ',' << gap << ',' << e.type1_level << ',' << e.rate_std_error
       << '\n';
  }
  emit(os.str(), out);
  std::cerr << "winfer steinsanov: gap non-increasing in n: " << (monotone ? "yes" : "no") << "\n";
  if (nan) {
    std::cerr << "winfer: NaN rate\n";
    return numerical;
  }
  return ok;
}

// ---- cramer-rao ------------------------------------------------------------

struct CramerRaoArgs {
  std::string family = "gaussian-shift";
  double theta = 0.0;
  double variance = 1.0;
  double gamma = 0.5;
  std::string estimator = "mean";
  std::optional<double> shift;
  std::size_t n = 5;
  std::size_t trials = 1'000'000;
  std::uint64_t seed = 20240611;
  bool van_trees = false;
  std::string prior = "";
  double prior_mean = NAN;
  double prior_scale = NAN;
  std::size_t van_trees_trials = 100'000;
};

json risk_row(const std::string& name, const RiskBound& b, Writer& w) {
  return {{"name", name},         {"lhs", w.num(b.lhs)},         {"lhs_error", w.num(b.lhs_error)},
          {"rhs", w.num(b.rhs)},  {"rhs_error", w.num(b.rhs_error)}, {"trials", b.trials},
          {"holds", b.holds()}};
}

int cmd_cramer_rao(const Globals& g, const CramerRaoArgs& a, const std::string& out) {
  const bool shift_family = a.family == "gaussian-shift";
  if (!shift_family && a.family != "gaussian-scale") throw SchemaError("--family must be gaussian-shift or gaussian-scale");
  if (a.n < 1) throw SchemaError("--n must be >= 1");

  const ParametricModel model =
      shift_family ? ParametricModel::gaussian_shift(a.variance) : ParametricModel::gaussian_scale();
  // Shift family: phi(x) = e^{gamma x}. Scale family: e^{gamma x / theta}
  // with theta the evaluation point.
  const WeightFunction phi = WeightFunction::exponential(shift_family ? a.gamma : a.gamma / a.theta);
  const double shift = a.shift.value_or(shift_family ? -a.variance * a.gamma : 0.0);

  EstimatorSpec est;
  bool analytic_mean = false, analytic_unbiased = false;
  if (a.estimator == "mean") {
    if (shift_family) {
      est = gaussian_shift_mean_estimator(a.variance, a.gamma);
      analytic_mean = true;
    } else {
      est = EstimatorSpec::sample_mean();
    }
  } else if (a.estimator == "shifted-mean") {
    if (shift_family && shift == -a.variance * a.gamma) {
      est = gaussian_shift_unbiased_estimator(a.variance, a.gamma);
      analytic_unbiased = true;
    } else {
      est = EstimatorSpec::shifted_mean(shift);
    }
  } else if (a.estimator == "rms") {
    est = EstimatorSpec::root_mean_square();
  } else {
    throw SchemaError("--estimator must be mean, shifted-mean or rms");
  }

  EstimationConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.van_trees_trials = a.van_trees_trials;
  cfg.convention = g.convention();

  Writer w;
  const Vec theta{{a.theta}};
  json rows = json::array();
  bool all_hold = true;
  auto add = [&](const std::string& name, const RiskBound& b) {
    rows.push_back(risk_row(name, b, w));
    all_hold = all_hold && b.holds();
  };
  const RiskBound ra = cramer_rao_A(model, phi, theta, a.n, est, cfg);
  add("cramer-rao-A", ra);
  add("cramer-rao-B", cramer_rao_B(model, phi, theta, a.n, est, cfg));

  json closed, extra;
  if (shift_family) {
    closed["weighted_fisher"] = w.num(closed_form::shift_gaussian_fisher(a.theta, a.variance, a.gamma));
    if (analytic_mean) {
      const double risk = closed_form::shift_gaussian_mean_risk(a.theta, a.variance, a.gamma, a.n);
      closed["risk"] = w.num(risk);
      closed["rhs_A"] = w.num(risk);
      closed["rhs_B"] = w.num(closed_form::shift_gaussian_mean_bound_B(a.theta, a.variance, a.gamma, a.n));
      extra["attains_A"] = std::abs(ra.lhs - ra.rhs) <= 3 * std::hypot(ra.lhs_error, ra.rhs_error);
    }
    if (analytic_unbiased) {
      closed["risk"] = w.num(closed_form::shift_gaussian_unbiased_risk(a.theta, a.variance, a.gamma, a.n));
      closed["rhs_A"] = w.num(closed_form::shift_gaussian_unbiased_bound(a.theta, a.variance, a.gamma, a.n));
    }
  } else {
    closed["weighted_fisher"] = w.num(closed_form::scale_gaussian_fisher(a.theta, a.gamma));
    closed["nfold_weighted_fisher"] =
        w.num(closed_form::scale_gaussian_nfold_fisher(a.theta, a.gamma, a.n, g.convention()));
  }

  if (a.van_trees) {
    const std::string kind = a.prior.empty() ? (shift_family ? "gaussian" : "bump") : a.prior;
    const double center = std::isnan(a.prior_mean) ? a.theta : a.prior_mean;
    const double scale = std::isnan(a.prior_scale) ? (shift_family ? 1.0 : 0.5 * a.theta) : a.prior_scale;
    PriorSpec prior = kind == "gaussian" ? PriorSpec::gaussian(Vec{{center}}, Mat{{scale * scale}})
                      : kind == "bump"   ? PriorSpec::bump(Vec{{center}}, scale)
                                         : throw SchemaError("--prior must be gaussian or bump");
    add("van-trees-A", van_trees(model, phi, a.n, est, prior, VanTreesVersion::A, cfg));
    add("van-trees-B", van_trees(model, phi, a.n, est, prior, VanTreesVersion::B, cfg));
    add("van-trees-C", van_trees(model, phi, a.n, est, prior, VanTreesVersion::C, cfg));
    extra["prior"] = {{"kind", kind}, {"center", center}, {kind == "gaussian" ? "sd" : "width", scale}};
  }

  json inputs{{"family", a.family},     {"theta", a.theta},     {"variance", a.variance}, {"gamma", a.gamma},
              {"estimator", a.estimator}, {"shift", shift},       {"n", a.n},               {"trials", a.trials},
              {"van_trees", a.van_trees}, {"prior", a.prior}};
  json report{{"schema", 1}};
  report["metadata"] = metadata(g, "cramer-rao", inputs, a.seed);
  report["family"] = a.family;
  report["weight"] = phi.describe();
  report["estimator"] = est.name;
  report["theta"] = a.theta;
  report["n"] = a.n;
  report["rows"] = rows;
  report["closed_form"] = closed;
  for (auto& [k, v] : extra.items()) report[k] = v;
  const bool clean = all_hold && !w.saw_nan;
  report["status"] = clean ? "ok" : (w.saw_nan ? "numerical-failure" : "bound-violated");
  emit(report.dump(2) + "\n", out);
  return clean ? ok : numerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"winfer: weighted information measures and bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--as-printed", g.as_printed, "Use the published formulas where they differ from the corrected ones");
  app.add_flag("--reproducible", g.reproducible, "Omit the timestamp from reports");
  app.set_version_flag("--version", kVersion);

  std::string out;

  auto* compute = app.add_subcommand("compute", "Compute the quantities requested in a JSON problem spec");
  std::string spec_path;
  compute->add_option("spec", spec_path, "Problem spec (JSON)")->required();
  compute->add_option("--out", out, "Write the report here instead of stdout");

  auto* verify_cmd = app.add_subcommand("verify", "Run a randomized verification suite");
  std::string suite;
  std::size_t instances = 100;
  std::uint64_t seed = 1;
  std::string csv;
  verify_cmd->add_option("--suite", suite, "Suite name")->required();
  verify_cmd->add_option("--instances", instances, "Number of random instances")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed, "Seed");
  verify_cmd->add_option("--out", out, "Write the report here instead of stdout");
  verify_cmd->add_option("--csv", csv, "Also write the per-check rows as CSV");

  auto* stein = app.add_subcommand("steinsanov", "Stein-Sanov rate against n, as CSV");
  std::string stein_spec, n_list = "25,50,100,200", method = "exact";
  double eta = 0.05;
  std::size_t samples = 100000;
  std::uint64_t stein_seed = 1;
  stein->add_option("--spec", stein_spec, "Problem spec (JSON)")->required();
  stein->add_option("--n-list", n_list, "Comma-separated sample sizes");
  stein->add_option("--eta", eta, "Acceptance half-width")->check(CLI::PositiveNumber);
  stein->add_option("--method", method, "exact or mc");
  stein->add_option("--samples", samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  stein->add_option("--seed", stein_seed, "Seed");
  stein->add_option("--out", out, "Write the CSV here instead of stdout");

  auto* cr = app.add_subcommand("cramer-rao", "Weighted Cramer-Rao and van Trees experiment");
  CramerRaoArgs cra;
  double shift = NAN;
  cr->add_option("--family", cra.family, "gaussian-shift or gaussian-scale");
  cr->add_option("--theta", cra.theta, "Parameter value (the scale for gaussian-scale)");
  cr->add_option("--variance", cra.variance, "Known variance of the shift family")->check(CLI::PositiveNumber);
  cr->add_option("--gamma", cra.gamma, "Weight exponent");
  cr->add_option("--estimator", cra.estimator, "mean, shifted-mean or rms");
  cr->add_option("--shift", shift, "Offset for shifted-mean (default -variance*gamma)");
  cr->add_option("--n", cra.n, "Sample size");
  cr->add_option("--trials", cra.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cr->add_option("--seed", cra.seed, "Seed");
  cr->add_flag("--van-trees", cra.van_trees, "Add van Trees rows A, B and C");
  cr->add_option("--prior", cra.prior, "gaussian or bump (default by family)");
  cr->add_option("--prior-mean", cra.prior_mean, "Prior center (default theta)");
  cr->add_option("--prior-scale", cra.prior_scale, "Prior sd (gaussian) or half-width (bump)");
  cr->add_option("--van-trees-trials", cra.van_trees_trials, "Monte Carlo trials for van Trees")
      ->check(CLI::PositiveNumber);
  cr->add_option("--out", out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*compute) return cmd_compute(g, spec_path, out);
    if (*verify_cmd) return cmd_verify(g, suite, instances, seed, out, csv);
    if (*stein) return cmd_steinsanov(stein_spec, n_list, eta, method, samples, stein_seed, out);
    if (!std::isnan(shift)) cra.shift = shift;
    return cmd_cramer_rao(g, cra, out);
  } catch (const SchemaError& e) {
    std::cerr << "winfer: " << e.what() << "\n";
    return usage;
  } catch (const Error& e) {
    const bool bad_input = e.kind() == ErrorKind::invalid_argument || e.kind() == ErrorKind::illegal_parameters ||
                           e.kind() == ErrorKind::domain_mismatch || e.kind() == ErrorKind::parameter_out_of_domain;
    std::cerr << "winfer: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return bad_input ? usage : numerical;
  }
}
