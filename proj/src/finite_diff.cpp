#include "winfer/finite_diff.hpp"

#include <cmath>

#include "winfer/error.hpp"

namespace winfer {

namespace {

double eval(const ScalarField& f, const Vec& x) {
  double v;
  try {
    v = f(x);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::evaluation_failure, e.what());
  }
  if (!std::isfinite(v))
    throw Error(ErrorKind::evaluation_failure, "field is not finite near the differentiation point");
  return v;
}

double step(double h, double x) { return h * std::max(1.0, std::abs(x)); }

}  // namespace

Vec finite_difference_gradient(const ScalarField& f, const Vec& theta, double h) {
  if (!(h > 0)) throw Error(ErrorKind::invalid_argument, "step must be > 0");
  Vec g(theta.size());
  for (Eigen::Index l = 0; l < theta.size(); ++l) {
    const double s = step(h, theta(l));
    Vec up = theta, dn = theta;
    up(l) += s;
    dn(l) -= s;
    g(l) = (eval(f, up) - eval(f, dn)) / (up(l) - dn(l));
  }
  return g;
}

Mat finite_difference_hessian(const ScalarField& f, const Vec& theta, double h) {
  if (!(h > 0)) throw Error(ErrorKind::invalid_argument, "step must be > 0");
  const Eigen::Index d = theta.size();
  Mat H(d, d);
  const double f0 = eval(f, theta);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double si = step(h, theta(i));
    for (Eigen::Index j = i; j < d; ++j) {
      const double sj = step(h, theta(j));
      if (i == j) {
        Vec up = theta, dn = theta;
        up(i) += si;
        dn(i) -= si;
        H(i, i) = (eval(f, up) - 2.0 * f0 + eval(f, dn)) / (si * si);
        continue;
      }
      auto shifted = [&](double a, double b) {
        Vec x = theta;
        x(i) += a * si;
        x(j) += b * sj;
        return eval(f, x);
      };
      H(i, j) = H(j, i) =
          (shifted(1, 1) - shifted(1, -1) - shifted(-1, 1) + shifted(-1, -1)) / (4.0 * si * sj);
    }
  }
  return H;
}

double finite_difference(const std::function<double(double)>& f, double theta, double h) {
  Vec t(1);
  t(0) = theta;
  return finite_difference_gradient([&](const Vec& x) { return f(x(0)); }, t, h)(0);
}

}  // namespace winfer
