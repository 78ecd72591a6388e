#pragma once

#include <cmath>
#include <cstdint>

#include "psd/kernel.hpp"

namespace psd::detail {

// erf(z) stored as sign * (1 - tail) with tail = erfc(|z|), so that
// differences of two values near +-1 keep full relative precision.
struct ErfEdge {
  double tail;
  bool positive;
};

inline ErfEdge make_edge(double z, std::uint64_t& erf_calls) {
  if (std::isinf(z)) return {0.0, z > 0.0};
  ++erf_calls;
  return {psd::erfc(std::fabs(z)), z >= 0.0};
}

/// erf(hi) - erf(lo), clamped at zero.
inline double erf_diff(ErfEdge lo, ErfEdge hi) {
  double v;
  if (lo.positive && hi.positive) {
    v = lo.tail - hi.tail;
  } else if (!lo.positive && !hi.positive) {
    v = hi.tail - lo.tail;
  } else if (!lo.positive && hi.positive) {
    v = (1.0 - lo.tail) + (1.0 - hi.tail);
  } else {
    v = 0.0;
  }
  return v > 0.0 ? v : 0.0;
}

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// (pi/4)^{d/2} det(diag(scale * eta))^{-1/2}
inline double gaussian_box_constant(const psd::Vector& eta, double scale) {
  double c = 1.0;
  for (psd::Index k = 0; k < eta.size(); ++k) {
    c *= std::sqrt(0.25 * M_PI / (scale * eta[k]));
  }
  return c;
}

}  // namespace psd::detail
