#pragma once

#include "winfer/divergence.hpp"

namespace winfer {

// Weight for the closed-form weighted TV between N(0,1) and N(a,1).
struct GaussianTvWeight {
  enum class Kind { poly, abs, exp };
  Kind kind = Kind::abs;
  double b = 0.0, c = 0.0;  // poly: x^2 + b x + c, c >= b^2/4
  double gamma = 0.0;       // exp: e^{gamma x}

  static GaussianTvWeight poly(double b, double c) { return {Kind::poly, b, c, 0.0}; }
  static GaussianTvWeight absolute() { return {Kind::abs, 0.0, 0.0, 0.0}; }
  static GaussianTvWeight exponential(double gamma) { return {Kind::exp, 0.0, 0.0, gamma}; }

  WeightFunction to_weight() const;
};

// tau between N(0,1) and N(a,1), a >= 0. The published forms are available
// through Convention::as_printed; all three differ from the integral:
//   poly: an extra a(a+b) term,
//   abs:  (a/2)(1 + Erf(a/(2 sqrt 2))),
//   exp:  a trailing -2 inside the bracket and no leading 1/2.
double gaussian_tv_closed_form(double a, const GaussianTvWeight& wf,
                               Convention conv = Convention::corrected);

}  // namespace winfer
