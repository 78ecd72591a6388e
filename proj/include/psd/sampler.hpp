#pragma once

// Exact sampling from the dyadic approximation p_{Q,rho} of a PSD model.
//
// The box is bisected along its longest side (lowest index on ties) until
// every side is <= rho. At each bisection k ~ Binomial(N, I(Q1)/I(Q)) of
// the N requested points go to the first half and N - k to the second;
// leaves receive uniform points. The output is randomly permuted, so the
// rows are i.i.d. draws from
//
//   p_{Q,rho} = 1/I(Q) sum_{leaves L} I(L)/|L| 1_L.

#include <cstdint>
#include <vector>

#include "psd/box.hpp"
#include "psd/integration.hpp"
#include "psd/model.hpp"

namespace psd {

struct SamplerParams {
  double rho = 1e-3;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  // Evaluate every bisection integral with `integrate` (2 d m^2 erf calls)
  // instead of refreshing only the split axis (m(m+1)/2 erf calls).
  bool full_integrals = false;
};

struct SampleRun {
  Matrix samples;  // n x d
  IntegralAccounting accounting;
  double rho_used = 0.0;
  std::uint64_t leaf_count = 0;  // leaves that received at least one point
  double integral_bound = 0.0;   // see integral_count_bound
  bool bound_satisfied = false;
};

/// Geometry of the dyadic decomposition D_{Q,rho}. A cell is addressed by a
/// per-axis (level, index) pair; its corners along axis k are
/// a_k + side_k * index / 2^level and a_k + side_k * (index + 1) / 2^level,
/// so neighbouring cells share bit-identical faces.
class DyadicFrame {
 public:
  DyadicFrame(const HyperRectangle& root, double rho);

  Index dim() const { return static_cast<Index>(depth_.size()); }
  const HyperRectangle& root() const { return root_; }
  double rho() const { return rho_; }

  /// Number of halvings axis k receives before its side is <= rho.
  int depth(Index k) const { return depth_[static_cast<std::size_t>(k)]; }
  int total_depth() const;

  double coordinate(Index k, int level, std::uint64_t index) const;
  double cell_side(Index k, int level) const;

  /// Longest side (lowest index on ties) of the cell at `levels`, or -1 when
  /// the cell is a leaf.
  Index split_axis(const std::vector<int>& levels) const;

  HyperRectangle cell(const std::vector<int>& levels,
                      const std::vector<std::uint64_t>& indices) const;

 private:
  HyperRectangle root_;
  double rho_;
  std::vector<int> depth_;
};

/// Upper bound on bisection integrals: N max(0, log2|Q|) + N d log2(2/rho) + 1.
double integral_count_bound(const HyperRectangle& q, std::uint64_t n,
                            double rho);

SampleRun sample(const GaussianPsdModel& model, const HyperRectangle& q,
                 const SamplerParams& params);

/// Generic path: one `integral` call per bisection.
SampleRun sample(const BoxIntegrable& density, const HyperRectangle& q,
                 const SamplerParams& params);

enum class DistanceMetric { kTotalVariation, kHellinger };

/// rho_TV = I(Q) eps / (|Q| Lip(A)),  rho_H = sqrt(I(Q)) eps / (sqrt|Q| Lip(a)).
double adaptive_rho(const GaussianPsdModel& model, const HyperRectangle& q,
                    double epsilon, DistanceMetric metric);
double adaptive_rho(const RankOneModel& model, const HyperRectangle& q,
                    double epsilon, DistanceMetric metric);

/// Grows the center bounding box by doubling about its center until it holds
/// at least 1 - eps_mass of the total mass. Zero-width sides start at
/// +-1/sqrt(2 eta_k) around the center.
HyperRectangle find_support(const GaussianPsdModel& model, double eps_mass);

}  // namespace psd
