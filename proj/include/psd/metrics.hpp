#pragma once

// Distances used for validation: exact small-d TV / Hellinger / W1 between
// p_Q = f 1_Q / I(Q) and its dyadic approximation p_{Q,rho}, and the
// empirical MMD between two sample sets.
//
// Conventions: tv = int |p - q| (no 1/2), hellinger = ||sqrt p - sqrt q||_2
// (no 1/sqrt 2).

#include <cstdint>
#include <optional>
#include <vector>

#include "psd/box.hpp"
#include "psd/integration.hpp"
#include "psd/model.hpp"
#include "psd/sampler.hpp"

namespace psd {

inline constexpr std::uint64_t kDefaultLeafCap = std::uint64_t{1} << 24;

/// The piecewise-constant density p_{Q,rho}. Leaves are the cells of the
/// sampler's DyadicFrame at full depth, flattened with axis 0 fastest.
class DyadicDensity {
 public:
  DyadicDensity(const BoxIntegrable& density, const HyperRectangle& q, double rho,
                std::uint64_t leaf_cap = kDefaultLeafCap);

  const DyadicFrame& frame() const { return frame_; }
  double total_mass() const { return total_; }  // I(Q)
  std::uint64_t leaf_count() const { return masses_.size(); }
  /// I(leaf) / I(Q).
  double mass(std::uint64_t leaf) const { return masses_[leaf]; }
  const std::vector<double>& masses() const { return masses_; }
  HyperRectangle leaf_box(std::uint64_t leaf) const;
  /// Leaf containing x (x must lie in Q).
  std::uint64_t leaf_of(const Eigen::Ref<const Vector>& x) const;
  /// p_{Q,rho}(x); zero outside Q.
  double value(const Eigen::Ref<const Vector>& x) const;
  /// CDF of p_{Q,rho} (d = 1 only).
  double cdf(double x) const;

 private:
  std::vector<std::uint64_t> leaf_indices(std::uint64_t leaf) const;

  DyadicFrame frame_;
  std::vector<int> levels_;
  double total_ = 0.0;
  std::vector<double> masses_;
};

DyadicDensity dyadic_density(const GaussianPsdModel& model, const HyperRectangle& q,
                             double rho, std::uint64_t leaf_cap = kDefaultLeafCap);

struct DistanceReport {
  double tv = 0.0;
  double hellinger = 0.0;
  std::optional<double> w1;  // d = 1 only
  // Computable upper bounds, when the Lipschitz bounds are available.
  std::optional<double> tv_bound;
  std::optional<double> hellinger_bound;
  std::optional<double> w1_bound;
};

/// Per-leaf adaptive quadrature (absolute tolerance 1e-9 per leaf). d <= 2.
DistanceReport exact_distances(const BoxIntegrable& density, const HyperRectangle& q,
                               double rho);
/// Adds tv_bound (isotropic eta) and w1_bound.
DistanceReport exact_distances(const GaussianPsdModel& model, const HyperRectangle& q,
                               double rho);
/// Adds hellinger_bound as well.
DistanceReport exact_distances(const RankOneModel& model, const HyperRectangle& q,
                               double rho);

/// sqrt(mean K_pp + mean K_qq - 2 mean K_pq) with k_eta; exactly symmetric
/// and exactly 0 for identical inputs.
double empirical_mmd(const Matrix& p, const Matrix& q, const PrecisionVector& eta);

}  // namespace psd
