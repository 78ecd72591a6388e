#pragma once

#include <Eigen/Dense>

namespace psd {

/// Axis-aligned box prod_k [a_k, b_k). Corners may be +-infinity.
class HyperRectangle {
 public:
  HyperRectangle(Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// [lo, hi)^d
  static HyperRectangle cube(double lo, double hi, Eigen::Index d);
  static HyperRectangle whole_space(Eigen::Index d);

  Eigen::Index dim() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double lower(Eigen::Index k) const { return lower_[k]; }
  double upper(Eigen::Index k) const { return upper_[k]; }
  double side(Eigen::Index k) const { return upper_[k] - lower_[k]; }

  bool is_bounded() const;
  double volume() const;
  double max_side() const;

  /// Minimal index among the longest sides.
  Eigen::Index longest_axis() const;

  /// Halves along `axis`; first is the lower half.
  std::pair<HyperRectangle, HyperRectangle> split(Eigen::Index axis) const;

  /// Same center, every side doubled.
  HyperRectangle doubled() const;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  bool contains(const HyperRectangle& other) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace psd
