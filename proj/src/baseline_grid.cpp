#include "psd/baseline_grid.hpp"

#include <algorithm>
#include <cmath>

#include "detail/erf_edge.hpp"
#include "psd/errors.hpp"
#include "psd/rng.hpp"

namespace psd {

GridSampler::GridSampler(HyperRectangle domain, Index side, std::vector<double> weights)
    : domain_(std::move(domain)), side_(side) {
  if (!domain_.is_bounded()) throw DomainError("grid: domain must be bounded");
  if (side < 1) throw ArgumentError("grid: side must be >= 1");
  std::uint64_t tiles = 1;
  for (Index k = 0; k < domain_.dim(); ++k) tiles *= static_cast<std::uint64_t>(side);
  if (weights.size() != tiles) throw ArgumentError("grid: weight count mismatch");
  detail::CompensatedSum total;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ContractViolation("grid: weights must be finite and >= 0");
    }
    total.add(w);
  }
  const double z = total.value();
  if (!(z > 0.0)) throw EmptyMassError("grid: every tile has zero density");
  probabilities_.resize(tiles);
  cumulative_.resize(tiles);
  detail::CompensatedSum run;
  for (std::size_t t = 0; t < tiles; ++t) {
    probabilities_[t] = weights[t] / z;
    run.add(weights[t]);
    cumulative_[t] = run.value() / z;
  }
  cumulative_.back() = 1.0;
}

double GridSampler::edge(Index k, std::uint64_t i) const {
  if (i == 0) return domain_.lower(k);
  if (i == static_cast<std::uint64_t>(side_)) return domain_.upper(k);
  return domain_.lower(k) +
         domain_.side(k) * static_cast<double>(i) / static_cast<double>(side_);
}

HyperRectangle GridSampler::tile(std::uint64_t t) const {
  const Index d = domain_.dim();
  Vector lo(d);
  Vector hi(d);
  for (Index k = 0; k < d; ++k) {
    const std::uint64_t i = t % static_cast<std::uint64_t>(side_);
    t /= static_cast<std::uint64_t>(side_);
    lo[k] = edge(k, i);
    hi[k] = edge(k, i + 1);
  }
  return HyperRectangle(lo, hi);
}

Vector GridSampler::tile_center(std::uint64_t t) const {
  const HyperRectangle box = tile(t);
  return 0.5 * (box.lower() + box.upper());
}

std::uint64_t GridSampler::pick(double u) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto t = static_cast<std::uint64_t>(it - cumulative_.begin());
  return std::min<std::uint64_t>(t, cumulative_.size() - 1);
}

Index grid_side(std::uint64_t n_evals, Index d) {
  if (n_evals < 1 || d < 1) throw ArgumentError("grid: need n_evals >= 1 and d >= 1");
  auto fits = [&](std::uint64_t s) {
    long double p = 1.0L;
    for (Index k = 0; k < d; ++k) p *= static_cast<long double>(s);
    return p <= static_cast<long double>(n_evals);
  };
  auto s = static_cast<std::uint64_t>(
      std::floor(std::pow(static_cast<double>(n_evals), 1.0 / static_cast<double>(d))));
  s = std::max<std::uint64_t>(s, 1);
  while (!fits(s)) --s;
  while (fits(s + 1)) ++s;
  return static_cast<Index>(s);
}

GridSampler build_grid(const EvaluationOracle& oracle, const HyperRectangle& q,
                       std::uint64_t n_evals) {
  const Index side = grid_side(n_evals, q.dim());
  // A temporary sampler gives the tile geometry; weights are filled next.
  std::uint64_t tiles = 1;
  for (Index k = 0; k < q.dim(); ++k) tiles *= static_cast<std::uint64_t>(side);
  const GridSampler shape(q, side, std::vector<double>(tiles, 1.0));
  std::vector<double> weights(tiles);
  for (std::uint64_t t = 0; t < tiles; ++t) {
    const double v = oracle(shape.tile_center(t));
    weights[t] = oracle.mode() == OracleMode::kSquareRoot ? v * v : v;
  }
  return GridSampler(q, side, std::move(weights));
}

Matrix grid_sample(const GridSampler& gs, std::uint64_t n, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  const Index d = gs.domain().dim();
  Matrix out(static_cast<Index>(n), d);
  for (Index r = 0; r < out.rows(); ++r) {
    const HyperRectangle box = gs.tile(gs.pick(rng.uniform()));
    for (Index k = 0; k < d; ++k) {
      double x = box.lower(k) + box.side(k) * rng.uniform();
      if (x >= box.upper(k)) x = std::nextafter(box.upper(k), box.lower(k));
      out(r, k) = x;
    }
  }
  return out;
}

}  // namespace psd
