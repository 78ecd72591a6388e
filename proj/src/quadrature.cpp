#include "psd/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "psd/errors.hpp"

namespace psd {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

// Boost's tolerance is relative to the L1 norm of the integrand; one
// unrefined rule estimates that norm, then the adaptive pass targets the
// absolute tolerance.
double adaptive(const std::function<double(double)>& f, double a, double b,
                const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  double value = Rule::integrate(f, a, b, 0, 0.0, &error, &l1);
  if (error > 0.1 * opts.abs_tol && l1 > 0.0) {
    const double rel = std::clamp(0.1 * opts.abs_tol / l1, 1e-15, 1e-3);
    value = Rule::integrate(f, a, b, opts.max_depth, rel, &error, &l1);
  }
  if (!std::isfinite(value)) throw NumericalError("quadrature: non-finite result");
  return value;
}

double nested(const std::function<double(const Vector&)>& f, const HyperRectangle& q,
              Vector& x, Index axis, const QuadratureOptions& opts) {
  const Index d = q.dim();
  if (axis == d - 1) {
    return adaptive(
        [&](double t) {
          x[axis] = t;
          return f(x);
        },
        q.lower(axis), q.upper(axis), opts);
  }
  return adaptive(
      [&](double t) {
        x[axis] = t;
        return nested(f, q, x, axis + 1, opts);
      },
      q.lower(axis), q.upper(axis), opts);
}

}  // namespace

double quadrature_1d(const std::function<double(double)>& f, double a, double b,
                     const QuadratureOptions& opts) {
  if (std::isnan(a) || std::isnan(b) || a > b) {
    throw ArgumentError("quadrature_1d: need a <= b");
  }
  return adaptive(f, a, b, opts);
}

double quadrature_box(const std::function<double(const Vector&)>& f,
                      const HyperRectangle& q, const QuadratureOptions& opts) {
  Vector x = Vector::Zero(q.dim());
  return nested(f, q, x, 0, opts);
}

}  // namespace psd
