#pragma once

#include <functional>

#include "winfer/distribution.hpp"

namespace winfer {

using ScalarField = std::function<double(const Vec&)>;

// Central differences per coordinate with step h * max(1, |theta_l|).
Vec finite_difference_gradient(const ScalarField& f, const Vec& theta, double h = 1e-5);

// Second-order central differences; symmetric result.
Mat finite_difference_hessian(const ScalarField& f, const Vec& theta, double h = 1e-4);

// Scalar convenience for one-parameter families.
double finite_difference(const std::function<double(double)>& f, double theta, double h = 1e-5);

}  // namespace winfer
