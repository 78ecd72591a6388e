#pragma once

// Adaptive Gauss-Kronrod quadrature over boxes by nesting 1-D rules.
// Used as an independent check on the closed-form integrals and for the
// exact distance computations.

#include <functional>

#include "psd/box.hpp"
#include "psd/kernel.hpp"

namespace psd {

struct QuadratureOptions {
  double abs_tol = 1e-9;
  unsigned max_depth = 12;
};

/// int_a^b f(t) dt; infinite limits allowed.
double quadrature_1d(const std::function<double(double)>& f, double a, double b,
                     const QuadratureOptions& opts = {});

/// Integral over a box (any dimension, infinite corners allowed), one nested
/// rule per axis. Cost grows geometrically with d; meant for d <= 3.
double quadrature_box(const std::function<double(const Vector&)>& f,
                      const HyperRectangle& q, const QuadratureOptions& opts = {});

}  // namespace psd
