#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winfer/support.hpp"

namespace winfer {

// Nonnegative weight (value) function phi on an outcome space.
class WeightFunction {
 public:
  enum class Kind { constant, exponential, polynomial, absolute, table, product, custom };

  WeightFunction() = default;  // phi = 1

  static WeightFunction constant(double c);
  // phi(x) = e^{gamma x}; the vector form is phi(x) = e^{x . gamma}.
  static WeightFunction exponential(double gamma);
  static WeightFunction exponential(std::vector<double> gamma);
  // Ascending coefficients a0 + a1 x + a2 x^2 + ... Nonnegativity must be
  // certified on the given support, otherwise illegal-parameters is thrown.
  static WeightFunction polynomial(std::vector<double> coeffs, const Support& on);
  static WeightFunction absolute();
  static WeightFunction table(std::vector<double> values);
  // Factorized weight on n-tuples: prod_i factors[i](x_i).
  static WeightFunction product_of(std::vector<WeightFunction> factors);
  static WeightFunction custom(std::function<double(double)> fn, std::string name);

  Kind kind() const { return kind_; }
  double operator()(double x) const;
  double log_value(double x) const;
  double at(std::span<const double> x) const;
  double log_at(std::span<const double> x) const;

  // Weight of symbol i on a finite alphabet (tables by index, the rest by value).
  double on_alphabet(const Support& s, std::size_t i) const;
  std::vector<double> on_alphabet(const Support& s) const;
  // Throws domain-mismatch when the spec cannot live on the support.
  void check_support(const Support& s) const;

  // Laplace transform int_0^inf phi(x) e^{-lambda x} dx and its derivative,
  // available for constant, exponential, polynomial and absolute weights.
  std::optional<double> laplace(double lambda) const;
  std::optional<double> laplace_derivative(double lambda) const;

  bool is_unit() const { return kind_ == Kind::constant && c_ == 1.0; }
  double constant_value() const { return c_; }
  double gamma() const { return gamma_.empty() ? 0.0 : gamma_[0]; }
  const std::vector<double>& gamma_vector() const { return gamma_; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::vector<double>& table_values() const { return coeffs_; }
  const std::vector<WeightFunction>& factors() const { return *factors_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::constant;
  double c_ = 1.0;
  std::vector<double> gamma_;
  std::vector<double> coeffs_;
  std::shared_ptr<const std::vector<WeightFunction>> factors_;
  std::shared_ptr<const std::function<double(double)>> fn_;
  std::string name_;
};

}  // namespace winfer
