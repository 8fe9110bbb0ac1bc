#include "winfer/weight.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "winfer/error.hpp"

namespace winfer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double horner(const std::vector<double>& a, double x) {
  double r = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + *it;
  return r;
}

double factorial(std::size_t k) { return std::tgamma(static_cast<double>(k) + 1.0); }

}  // namespace

WeightFunction WeightFunction::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c))
    throw Error(ErrorKind::illegal_parameters, "constant weight must be finite and >= 0");
  WeightFunction w;
  w.kind_ = Kind::constant;
  w.c_ = c;
  return w;
}

WeightFunction WeightFunction::exponential(double gamma) {
  return exponential(std::vector<double>{gamma});
}

WeightFunction WeightFunction::exponential(std::vector<double> gamma) {
  if (gamma.empty()) throw Error(ErrorKind::illegal_parameters, "exponential weight needs gamma");
  WeightFunction w;
  w.kind_ = Kind::exponential;
  w.gamma_ = std::move(gamma);
  return w;
}

WeightFunction WeightFunction::polynomial(std::vector<double> coeffs, const Support& on) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(0.0);
  bool certified = false;
  if (on.kind() == SupportKind::finite_alphabet) {
    certified = true;
    for (double v : on.values()) certified = certified && horner(coeffs, v) >= 0.0;
  } else if ((on.kind() == SupportKind::half_line && on.lower() >= 0.0) ||
             on.kind() == SupportKind::nonneg_integers) {
    certified = true;
    for (double a : coeffs) certified = certified && a >= 0.0;
  }
  if (!certified && on.kind() != SupportKind::real_vector) {
    // x^2 + bx + c style: a2 > 0 and a1^2 <= 4 a0 a2.
    if (coeffs.size() == 1) {
      certified = coeffs[0] >= 0.0;
    } else if (coeffs.size() == 3) {
      certified = coeffs[2] > 0.0 && coeffs[1] * coeffs[1] <= 4.0 * coeffs[0] * coeffs[2];
    }
  }
  if (!certified)
    throw Error(ErrorKind::illegal_parameters,
                "polynomial weight lacks a nonnegativity certificate on this support");
  WeightFunction w;
  w.kind_ = Kind::polynomial;
  w.coeffs_ = std::move(coeffs);
  return w;
}

WeightFunction WeightFunction::absolute() {
  WeightFunction w;
  w.kind_ = Kind::absolute;
  return w;
}

WeightFunction WeightFunction::table(std::vector<double> values) {
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::illegal_parameters, "table weights must be finite and >= 0");
  WeightFunction w;
  w.kind_ = Kind::table;
  w.coeffs_ = std::move(values);
  return w;
}

WeightFunction WeightFunction::product_of(std::vector<WeightFunction> factors) {
  if (factors.empty()) throw Error(ErrorKind::illegal_parameters, "empty product weight");
  WeightFunction w;
  w.kind_ = Kind::product;
  w.factors_ = std::make_shared<const std::vector<WeightFunction>>(std::move(factors));
  return w;
}

WeightFunction WeightFunction::custom(std::function<double(double)> fn, std::string name) {
  WeightFunction w;
  w.kind_ = Kind::custom;
  w.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
  w.name_ = std::move(name);
  return w;
}

double WeightFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::exponential: return std::exp(gamma_[0] * x);
    case Kind::polynomial: return std::max(0.0, horner(coeffs_, x));
    case Kind::absolute: return std::abs(x);
    case Kind::table: {
      auto i = static_cast<std::size_t>(x);
      if (x < 0 || i >= coeffs_.size())
        throw Error(ErrorKind::domain_mismatch, "table weight evaluated off its alphabet");
      return coeffs_[i];
    }
    case Kind::product:
      throw Error(ErrorKind::domain_mismatch, "product weight needs a tuple argument");
    case Kind::custom: {
      double v = (*fn_)(x);
      if (!(v >= 0.0)) throw Error(ErrorKind::evaluation_failure, "custom weight returned < 0");
      return v;
    }
  }
  return 0.0;
}

double WeightFunction::log_value(double x) const {
  if (kind_ == Kind::exponential) return gamma_[0] * x;
  double v = (*this)(x);
  return v > 0.0 ? std::log(v) : kNegInf;
}

double WeightFunction::at(std::span<const double> x) const {
  if (kind_ == Kind::exponential || kind_ == Kind::product) return std::exp(log_at(x));
  if (kind_ == Kind::constant) return c_;
  if (x.size() != 1) throw Error(ErrorKind::domain_mismatch, "scalar weight given a vector point");
  return (*this)(x[0]);
}

double WeightFunction::log_at(std::span<const double> x) const {
  if (kind_ == Kind::exponential) {
    if (gamma_.size() == 1 && x.size() == 1) return gamma_[0] * x[0];
    if (gamma_.size() != x.size())
      throw Error(ErrorKind::domain_mismatch, "exponential weight dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += gamma_[i] * x[i];
    return s;
  }
  if (kind_ == Kind::product) {
    const auto& f = *factors_;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += f[f.size() == 1 ? 0 : i].log_value(x[i]);
    return s;
  }
  double v = at(x);
  return v > 0.0 ? std::log(v) : kNegInf;
}

double WeightFunction::on_alphabet(const Support& s, std::size_t i) const {
  if (kind_ == Kind::table) return coeffs_.at(i);
  return (*this)(s.values().at(i));
}

std::vector<double> WeightFunction::on_alphabet(const Support& s) const {
  check_support(s);
  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = on_alphabet(s, i);
  return w;
}

void WeightFunction::check_support(const Support& s) const {
  if (kind_ == Kind::table) {
    if (s.kind() != SupportKind::finite_alphabet)
      throw Error(ErrorKind::domain_mismatch, "table weight requires a finite alphabet");
    if (coeffs_.size() != s.size())
      throw Error(ErrorKind::domain_mismatch, "table length differs from alphabet size");
  }
  if (kind_ == Kind::exponential && s.kind() == SupportKind::real_vector &&
      gamma_.size() != s.dim() && gamma_.size() != 1)
    throw Error(ErrorKind::domain_mismatch, "exponential weight dimension mismatch");
}

std::optional<double> WeightFunction::laplace(double lambda) const {
  switch (kind_) {
    case Kind::constant: return c_ / lambda;
    case Kind::exponential:
      if (gamma_.size() != 1 || !(lambda > gamma_[0])) return std::nullopt;
      return 1.0 / (lambda - gamma_[0]);
    case Kind::polynomial: {
      double r = 0.0;
      for (std::size_t k = 0; k < coeffs_.size(); ++k)
        r += coeffs_[k] * factorial(k) / std::pow(lambda, static_cast<double>(k + 1));
      return r;
    }
    case Kind::absolute: return 1.0 / (lambda * lambda);
    default: return std::nullopt;
  }
}

std::optional<double> WeightFunction::laplace_derivative(double lambda) const {
  switch (kind_) {
    case Kind::constant: return -c_ / (lambda * lambda);
    case Kind::exponential:
      if (gamma_.size() != 1 || !(lambda > gamma_[0])) return std::nullopt;
      return -1.0 / ((lambda - gamma_[0]) * (lambda - gamma_[0]));
    case Kind::polynomial: {
      double r = 0.0;
      for (std::size_t k = 0; k < coeffs_.size(); ++k)
        r -= coeffs_[k] * factorial(k + 1) / std::pow(lambda, static_cast<double>(k + 2));
      return r;
    }
    case Kind::absolute: return -2.0 / (lambda * lambda * lambda);
    default: return std::nullopt;
  }
}

std::string WeightFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant: os << "constant(" << c_ << ")"; break;
    case Kind::exponential:
      os << "exponential(";
      for (std::size_t i = 0; i < gamma_.size(); ++i) os << (i ? "," : "") << gamma_[i];
      os << ")";
      break;
    case Kind::polynomial:
      os << "polynomial(";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
      os << ")";
      break;
    case Kind::absolute: os << "absolute"; break;
    case Kind::table:
      os << "table(";
      for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
      os << ")";
      break;
    case Kind::product: os << "product-of(" << factors_->size() << ")"; break;
    case Kind::custom: os << "custom(" << name_ << ")"; break;
  }
  return os.str();
}

}  // namespace winfer
