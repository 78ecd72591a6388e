#pragma once

// Gridding baseline: evaluate the density at the centers of an s^d tile
// grid over Q (s = floor(n^{1/d})), pick a tile with probability
// proportional to its center value, then a uniform point inside it.

#include <cstdint>
#include <vector>

#include "psd/box.hpp"
#include "psd/estimator.hpp"

namespace psd {

class GridSampler {
 public:
  GridSampler(HyperRectangle domain, Index side, std::vector<double> weights);

  const HyperRectangle& domain() const { return domain_; }
  Index side() const { return side_; }  // tiles per axis
  std::uint64_t tile_count() const { return probabilities_.size(); }
  std::uint64_t evaluations_used() const { return probabilities_.size(); }
  const std::vector<double>& probabilities() const { return probabilities_; }
  /// Tile t, flattened with axis 0 fastest.
  HyperRectangle tile(std::uint64_t t) const;
  Vector tile_center(std::uint64_t t) const;
  /// Index of the first tile whose cumulative probability exceeds u.
  std::uint64_t pick(double u) const;

 private:
  double edge(Index k, std::uint64_t i) const;

  HyperRectangle domain_;
  Index side_;
  std::vector<double> probabilities_;
  std::vector<double> cumulative_;
};

/// Largest s with s^d <= n.
Index grid_side(std::uint64_t n_evals, Index d);

/// Square-root oracles are squared before normalizing.
GridSampler build_grid(const EvaluationOracle& oracle, const HyperRectangle& q,
                       std::uint64_t n_evals);

Matrix grid_sample(const GridSampler& gs, std::uint64_t n, std::uint64_t seed);

}  // namespace psd
