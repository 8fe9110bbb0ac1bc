#include "winfer/gaussian_tv.hpp"

#include <cmath>
#include <numbers>

#include "winfer/error.hpp"

namespace winfer {

namespace {

const double kSqrt2 = std::numbers::sqrt2;

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

}  // namespace

WeightFunction GaussianTvWeight::to_weight() const {
  switch (kind) {
    case Kind::poly: return WeightFunction::polynomial({c, b, 1.0}, Support::real_line());
    case Kind::abs: return WeightFunction::absolute();
    case Kind::exp: return WeightFunction::exponential(gamma);
  }
  return {};
}

double gaussian_tv_closed_form(double a, const GaussianTvWeight& wf, Convention conv) {
  if (!(a >= 0.0) || !std::isfinite(a))
    throw Error(ErrorKind::illegal_parameters, "mean shift a must be finite and >= 0");
  const bool printed = conv == Convention::as_printed;
  const double erf_half = std::erf(a / (2.0 * kSqrt2));
  switch (wf.kind) {
    case GaussianTvWeight::Kind::poly: {
      if (wf.c < 0.25 * wf.b * wf.b)
        throw Error(ErrorKind::illegal_parameters, "polynomial weight needs c >= b^2/4");
      const double v = std::sqrt(2.0 / std::numbers::pi) * a * std::exp(-a * a / 8.0) +
                       (2.0 + a * a + a * wf.b + 2.0 * wf.c) * erf_half;
      return 0.5 * (printed ? v + a * (a + wf.b) : v);
    }
    case GaussianTvWeight::Kind::abs: {
      if (printed) return 0.5 * a * (1.0 + erf_half);
      // Split at 0 and a/2, where |x| and the sign of p - q change.
      return std_normal_pdf(0.0) - std_normal_pdf(a) + 0.5 * a + a * std_normal_cdf(-a) -
             a * std_normal_cdf(-0.5 * a);
    }
    case GaussianTvWeight::Kind::exp: {
      const double g = wf.gamma;
      const double pre = std::exp((g * g + 2.0 * g * a) / 2.0);
      const double bracket = std::erf((a + 2.0 * g) / (2.0 * kSqrt2)) +
                             std::exp(-g * a) * std::erf((a - 2.0 * g) / (2.0 * kSqrt2));
      return printed ? pre * (bracket - 2.0) : 0.5 * pre * bracket;
    }
  }
  return 0.0;
}

}  // namespace winfer
