#include "psd/box.hpp"

#include <cmath>
#include <limits>

#include "psd/errors.hpp"

namespace psd {

HyperRectangle::HyperRectangle(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1 || lower_.size() != upper_.size()) {
    throw ArgumentError("hyper-rectangle corners must share dimension >= 1");
  }
  for (Eigen::Index k = 0; k < lower_.size(); ++k) {
    if (std::isnan(lower_[k]) || std::isnan(upper_[k])) {
      throw ArgumentError("hyper-rectangle corner is NaN");
    }
    if (lower_[k] > upper_[k]) {
      throw ArgumentError("hyper-rectangle requires lower <= upper");
    }
    if (lower_[k] == std::numeric_limits<double>::infinity() ||
        upper_[k] == -std::numeric_limits<double>::infinity()) {
      throw ArgumentError("hyper-rectangle side is empty at infinity");
    }
  }
}

HyperRectangle HyperRectangle::cube(double lo, double hi, Eigen::Index d) {
  return HyperRectangle(Eigen::VectorXd::Constant(d, lo),
                        Eigen::VectorXd::Constant(d, hi));
}

HyperRectangle HyperRectangle::whole_space(Eigen::Index d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return cube(-inf, inf, d);
}

bool HyperRectangle::is_bounded() const {
  return lower_.allFinite() && upper_.allFinite();
}

double HyperRectangle::volume() const {
  double v = 1.0;
  for (Eigen::Index k = 0; k < dim(); ++k) v *= side(k);
  return v;
}

double HyperRectangle::max_side() const { return (upper_ - lower_).maxCoeff(); }

Eigen::Index HyperRectangle::longest_axis() const {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < dim(); ++k) {
    if (side(k) > side(best)) best = k;
  }
  return best;
}

std::pair<HyperRectangle, HyperRectangle> HyperRectangle::split(
    Eigen::Index axis) const {
  if (!std::isfinite(lower_[axis]) || !std::isfinite(upper_[axis])) {
    throw DomainError("cannot split an unbounded side");
  }
  const double mid = 0.5 * (lower_[axis] + upper_[axis]);
  Eigen::VectorXd first_upper = upper_;
  Eigen::VectorXd second_lower = lower_;
  first_upper[axis] = mid;
  second_lower[axis] = mid;
  return {HyperRectangle(lower_, first_upper),
          HyperRectangle(second_lower, upper_)};
}

HyperRectangle HyperRectangle::doubled() const {
  const Eigen::VectorXd center = 0.5 * (lower_ + upper_);
  const Eigen::VectorXd half = upper_ - lower_;
  return HyperRectangle(center - half, center + half);
}

bool HyperRectangle::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index k = 0; k < dim(); ++k) {
    if (!(x[k] >= lower_[k] && x[k] < upper_[k])) return false;
  }
  return true;
}

bool HyperRectangle::contains(const HyperRectangle& other) const {
  if (other.dim() != dim()) return false;
  return (other.lower_.array() >= lower_.array()).all() &&
         (other.upper_.array() <= upper_.array()).all();
}

}  // namespace psd
