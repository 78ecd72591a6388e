#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "psd/errors.hpp"
#include "psd/quadrature.hpp"

namespace psd {
namespace {

TEST(Quadrature, OneDimensionalClosedForms) {
  EXPECT_NEAR(quadrature_1d([](double t) { return std::sin(t); }, 0.0, std::numbers::pi), 2.0,
              1e-12);
  EXPECT_NEAR(quadrature_1d([](double t) { return std::exp(-t * t); }, -INFINITY, INFINITY),
              std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_EQ(quadrature_1d([](double) { return 1.0; }, 2.0, 2.0), 0.0);
  EXPECT_THROW(quadrature_1d([](double) { return 1.0; }, 1.0, 0.0), ArgumentError);
}

TEST(Quadrature, KinkedIntegrandMeetsAbsoluteTolerance) {
  const double v = quadrature_1d([](double t) { return std::fabs(t - 0.3); }, 0.0, 1.0);
  EXPECT_NEAR(v, 0.5 * 0.09 + 0.5 * 0.49, 1e-9);
}

TEST(Quadrature, NestedBoxes) {
  Vector lo(3), hi(3);
  lo << 0.0, -1.0, 0.0;
  hi << 1.0, 1.0, 2.0;
  const double v = quadrature_box(
      [](const Vector& x) { return x[0] * x[0] + x[1] * x[2]; }, HyperRectangle(lo, hi));
  EXPECT_NEAR(v, (1.0 / 3.0) * 2.0 * 2.0, 1e-10);
  const double gauss2 = quadrature_box(
      [](const Vector& x) { return std::exp(-x.squaredNorm()); }, HyperRectangle::whole_space(2));
  EXPECT_NEAR(gauss2, std::numbers::pi, 1e-9);
}

}  // namespace
}  // namespace psd
