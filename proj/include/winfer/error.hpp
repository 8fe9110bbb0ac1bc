#pragma once

#include <stdexcept>
#include <string>

namespace winfer {

enum class ErrorKind {
  non_convergent_integral,
  domain_mismatch,
  no_sampler,
  evaluation_failure,
  alphabet_too_large,
  zero_weight_mass,
  infinite_kl,
  enumeration_too_large,
  product_too_large,
  illegal_parameters,
  parameter_out_of_domain,
  domain_violation,
  bias_derivative_unavailable,
  boundary_theta,
  prior_not_smooth,
  regularity_failure,
  invalid_argument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace winfer
