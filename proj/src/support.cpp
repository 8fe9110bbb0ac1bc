#include "winfer/support.hpp"

#include <cmath>
#include <set>

#include "winfer/error.hpp"

namespace winfer {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::non_convergent_integral: return "non-convergent-integral";
    case ErrorKind::domain_mismatch: return "domain-mismatch";
    case ErrorKind::no_sampler: return "no-sampler";
    case ErrorKind::evaluation_failure: return "evaluation-failure";
    case ErrorKind::alphabet_too_large: return "alphabet-too-large";
    case ErrorKind::zero_weight_mass: return "zero-weight-mass";
    case ErrorKind::infinite_kl: return "infinite-kl";
    case ErrorKind::enumeration_too_large: return "enumeration-too-large";
    case ErrorKind::product_too_large: return "product-too-large";
    case ErrorKind::illegal_parameters: return "illegal-parameters";
    case ErrorKind::parameter_out_of_domain: return "parameter-out-of-domain";
    case ErrorKind::domain_violation: return "domain-violation";
    case ErrorKind::bias_derivative_unavailable: return "bias-derivative-unavailable";
    case ErrorKind::boundary_theta: return "boundary-theta";
    case ErrorKind::prior_not_smooth: return "prior-not-smooth";
    case ErrorKind::regularity_failure: return "regularity-failure";
    case ErrorKind::invalid_argument: return "invalid-argument";
  }
  return "unknown";
}

Support Support::finite(std::size_t m) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "finite alphabet needs m >= 1");
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = static_cast<double>(i);
  return finite(std::move(v));
}

Support Support::finite(std::vector<double> values, std::vector<std::string> labels) {
  if (values.empty()) throw Error(ErrorKind::invalid_argument, "finite alphabet needs m >= 1");
  if (labels.empty()) {
    for (std::size_t i = 0; i < values.size(); ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != values.size())
    throw Error(ErrorKind::invalid_argument, "label count differs from alphabet size");
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
    throw Error(ErrorKind::invalid_argument, "alphabet labels must be distinct");
  Support s;
  s.kind_ = SupportKind::finite_alphabet;
  s.values_ = std::move(values);
  s.labels_ = std::move(labels);
  return s;
}

Support Support::real_line() { return Support{}; }

Support Support::half_line(double lower) {
  Support s;
  s.kind_ = SupportKind::half_line;
  s.lower_ = lower;
  return s;
}

Support Support::nonneg_integers() {
  Support s;
  s.kind_ = SupportKind::nonneg_integers;
  return s;
}

Support Support::real_vector(std::size_t d) {
  if (d < 1) throw Error(ErrorKind::invalid_argument, "real-vector support needs d >= 1");
  Support s;
  s.kind_ = SupportKind::real_vector;
  s.dim_ = d;
  return s;
}

ReferenceMeasure Support::measure() const {
  return (kind_ == SupportKind::finite_alphabet || kind_ == SupportKind::nonneg_integers)
             ? ReferenceMeasure::counting
             : ReferenceMeasure::lebesgue;
}

bool Support::contains(double x) const {
  switch (kind_) {
    case SupportKind::finite_alphabet:
      return x >= 0 && x < static_cast<double>(values_.size()) && std::floor(x) == x;
    case SupportKind::real_line: return std::isfinite(x);
    case SupportKind::half_line: return x >= lower_;
    case SupportKind::nonneg_integers: return x >= 0 && std::floor(x) == x;
    case SupportKind::real_vector: return false;
  }
  return false;
}

bool Support::operator==(const Support& o) const {
  if (kind_ != o.kind_) return false;
  switch (kind_) {
    case SupportKind::finite_alphabet: return values_ == o.values_ && labels_ == o.labels_;
    case SupportKind::half_line: return lower_ == o.lower_;
    case SupportKind::real_vector: return dim_ == o.dim_;
    default: return true;
  }
}

}  // namespace winfer
