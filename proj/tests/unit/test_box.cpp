#include <cmath>

#include <gtest/gtest.h>

#include "psd/box.hpp"
#include "psd/errors.hpp"
#include "psd/kernel.hpp"

namespace psd {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(HyperRectangle, Validation) {
  EXPECT_THROW(HyperRectangle(vec({0.0}), vec({0.0, 1.0})), ArgumentError);
  EXPECT_THROW(HyperRectangle(vec({1.0}), vec({0.0})), ArgumentError);
  EXPECT_THROW(HyperRectangle(vec({NAN}), vec({0.0})), ArgumentError);
  EXPECT_THROW(HyperRectangle(vec({INFINITY}), vec({INFINITY})), ArgumentError);
  EXPECT_NO_THROW(HyperRectangle(vec({0.0}), vec({0.0})));
}

TEST(HyperRectangle, VolumeSidesAndBoundedness) {
  const HyperRectangle q(vec({-1.0, 0.0, 2.0}), vec({1.0, 3.0, 2.5}));
  EXPECT_DOUBLE_EQ(q.volume(), 2.0 * 3.0 * 0.5);
  EXPECT_DOUBLE_EQ(q.max_side(), 3.0);
  EXPECT_EQ(q.longest_axis(), 1);
  EXPECT_TRUE(q.is_bounded());
  EXPECT_FALSE(HyperRectangle::whole_space(2).is_bounded());
  EXPECT_TRUE(std::isinf(HyperRectangle::whole_space(2).volume()));
}

TEST(HyperRectangle, LongestAxisTiesPickLowestIndex) {
  const HyperRectangle q(vec({0.0, 0.0, 0.0}), vec({1.0, 2.0, 2.0}));
  EXPECT_EQ(q.longest_axis(), 1);
  EXPECT_EQ(HyperRectangle::cube(0.0, 1.0, 4).longest_axis(), 0);
}

TEST(HyperRectangle, SplitPartitionsExactly) {
  const HyperRectangle q(vec({-1.0, 0.0}), vec({3.0, 1.0}));
  const auto [a, b] = q.split(0);
  EXPECT_EQ(a.upper(0), 1.0);
  EXPECT_EQ(b.lower(0), 1.0);
  EXPECT_EQ(a.lower(1), 0.0);
  EXPECT_DOUBLE_EQ(a.volume() + b.volume(), q.volume());
  EXPECT_TRUE(q.contains(a));
  EXPECT_TRUE(q.contains(b));
  EXPECT_THROW(HyperRectangle::whole_space(1).split(0), DomainError);
}

TEST(HyperRectangle, ContainsIsHalfOpen) {
  const HyperRectangle q = HyperRectangle::cube(0.0, 1.0, 2);
  EXPECT_TRUE(q.contains(vec({0.0, 0.5})));
  EXPECT_FALSE(q.contains(vec({1.0, 0.5})));
  EXPECT_FALSE(q.contains(vec({0.5})));
}

TEST(HyperRectangle, DoubledKeepsCenter) {
  const HyperRectangle q(vec({1.0, -2.0}), vec({2.0, 0.0}));
  const HyperRectangle r = q.doubled();
  EXPECT_DOUBLE_EQ(r.lower(0), 0.5);
  EXPECT_DOUBLE_EQ(r.upper(0), 2.5);
  EXPECT_DOUBLE_EQ(r.lower(1), -3.0);
  EXPECT_DOUBLE_EQ(r.upper(1), 1.0);
  EXPECT_TRUE(r.contains(q));
}

}  // namespace
}  // namespace psd
