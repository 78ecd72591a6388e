#include "psd/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "detail/erf_edge.hpp"
#include "psd/errors.hpp"
#include "psd/rng.hpp"

namespace psd {

using detail::CompensatedSum;
using detail::ErfEdge;
using detail::erf_diff;
using detail::make_edge;

namespace {

constexpr int kMaxAxisDepth = 62;

void check_sampling_box(const HyperRectangle& q) {
  if (!q.is_bounded()) {
    throw DomainError(
        "sampling needs a bounded rectangle; use find_support to pick one");
  }
  for (Index k = 0; k < q.dim(); ++k) {
    if (!(q.side(k) > 0.0)) {
      throw DomainError("sampling rectangle has a zero-width side");
    }
  }
}

}  // namespace

DyadicFrame::DyadicFrame(const HyperRectangle& root, double rho)
    : root_(root), rho_(rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ArgumentError("rho must be finite and > 0");
  }
  check_sampling_box(root);
  depth_.resize(static_cast<std::size_t>(root.dim()));
  for (Index k = 0; k < root.dim(); ++k) {
    int h = 0;
    while (cell_side(k, h) > rho) {
      if (++h > kMaxAxisDepth) {
        throw ArgumentError("rho is too small for this rectangle (more than " +
                            std::to_string(kMaxAxisDepth) +
                            " halvings per axis)");
      }
    }
    depth_[static_cast<std::size_t>(k)] = h;
  }
}

int DyadicFrame::total_depth() const {
  int s = 0;
  for (int h : depth_) s += h;
  return s;
}

double DyadicFrame::cell_side(Index k, int level) const {
  return std::ldexp(root_.side(k), -level);
}

double DyadicFrame::coordinate(Index k, int level, std::uint64_t index) const {
  if (index == 0) return root_.lower(k);
  if (index == (std::uint64_t{1} << level)) return root_.upper(k);
  return root_.lower(k) +
         root_.side(k) * std::ldexp(static_cast<double>(index), -level);
}

Index DyadicFrame::split_axis(const std::vector<int>& levels) const {
  Index best = -1;
  double best_side = 0.0;
  for (Index k = 0; k < dim(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (levels[uk] >= depth_[uk]) continue;
    const double s = cell_side(k, levels[uk]);
    if (best < 0 || s > best_side) {
      best = k;
      best_side = s;
    }
  }
  // Axes already at depth have side <= rho < best_side, so a strict
  // comparison over unfinished axes equals min argmax over all axes.
  return best;
}

HyperRectangle DyadicFrame::cell(const std::vector<int>& levels,
                                 const std::vector<std::uint64_t>& indices) const {
  Vector lo(dim());
  Vector hi(dim());
  for (Index k = 0; k < dim(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    lo[k] = coordinate(k, levels[uk], indices[uk]);
    hi[k] = coordinate(k, levels[uk], indices[uk] + 1);
  }
  return HyperRectangle(std::move(lo), std::move(hi));
}

double integral_count_bound(const HyperRectangle& q, std::uint64_t n,
                            double rho) {
  const double nd = static_cast<double>(n);
  const double d = static_cast<double>(q.dim());
  return nd * std::max(0.0, std::log2(q.volume())) +
         nd * d * std::log2(2.0 / rho) + 1.0;
}

namespace {

// Shared state of one sampling run: output buffer, RNG and the dyadic
// cell currently being visited.
struct RunState {
  const DyadicFrame& frame;
  Xoshiro256 rng;
  Matrix out;
  Index next_row = 0;
  std::uint64_t leaves = 0;
  std::vector<int> levels;
  std::vector<std::uint64_t> indices;

  RunState(const DyadicFrame& f, std::uint64_t seed, std::uint64_t n)
      : frame(f),
        rng(seed),
        out(static_cast<Index>(n), f.dim()),
        levels(static_cast<std::size_t>(f.dim()), 0),
        indices(static_cast<std::size_t>(f.dim()), 0) {}

  void emit_uniform(std::uint64_t n) {
    ++leaves;
    const Index d = frame.dim();
    for (std::uint64_t s = 0; s < n; ++s) {
      for (Index k = 0; k < d; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const double lo = frame.coordinate(k, levels[uk], indices[uk]);
        const double hi = frame.coordinate(k, levels[uk], indices[uk] + 1);
        double v = lo + (hi - lo) * rng.uniform();
        if (v >= hi) v = std::nextafter(hi, lo);
        out(next_row, k) = v;
      }
      ++next_row;
    }
  }

  bool at_leaf() const { return frame.split_axis(levels) < 0; }

  SampleRun finish(const HyperRectangle& q, const SamplerParams& params,
                   const IntegralAccounting& acct) {
    if (next_row != out.rows()) {
      throw InternalError("sampler emitted the wrong number of points");
    }
    std::vector<std::uint64_t> perm(static_cast<std::size_t>(out.rows()));
    random_permutation(rng, perm);
    SampleRun run;
    run.samples.resize(out.rows(), out.cols());
    for (Index i = 0; i < out.rows(); ++i) {
      run.samples.row(i) = out.row(static_cast<Index>(perm[static_cast<std::size_t>(i)]));
    }
    run.accounting = acct;
    run.rho_used = params.rho;
    run.leaf_count = leaves;
    run.integral_bound = integral_count_bound(q, params.n, params.rho);
    run.bound_satisfied =
        static_cast<double>(acct.integral_evals) <= run.integral_bound;
    return run;
  }
};

double branch_probability(double part, double whole) {
  if (!(whole > 0.0)) return 0.5;
  return std::clamp(part / whole, 0.0, 1.0);
}

// Pairs (i <= j) of a Gaussian PSD model with nonzero weight
//   w = (2 - [i == j]) A_ij k_{eta/2}(x_i, x_j) c_{2 eta}
// together with their midpoints, pair-major (p * d + k).
struct PairSet {
  Index count = 0;
  std::vector<double> weight;
  std::vector<double> mean;
  std::vector<double> root_2eta;
};

PairSet build_pair_set(const GaussianPsdModel& model) {
  const Index m = model.size();
  const Index d = model.dim();
  const Matrix& a = model.coefficients();
  const Matrix& x = model.centers().values();
  const Vector& eta = model.precision().values();
  const double c_2eta = detail::gaussian_box_constant(eta, 2.0);

  PairSet s;
  s.root_2eta.resize(static_cast<std::size_t>(d));
  for (Index k = 0; k < d; ++k) s.root_2eta[static_cast<std::size_t>(k)] = std::sqrt(2.0 * eta[k]);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i <= j; ++i) {
      double log_k = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        log_k -= 0.5 * eta[k] * diff * diff;
      }
      const double kv = std::exp(log_k);
      const double w = (i == j ? 1.0 : 2.0) * a(i, j) * kv * c_2eta;
      if (w == 0.0 || kv < kKernelUnderflow) continue;
      s.weight.push_back(w);
      for (Index k = 0; k < d; ++k) s.mean.push_back(0.5 * (x(i, k) + x(j, k)));
      ++s.count;
    }
  }
  return s;
}

// Saved per-split data so the in-place tables can be restored on the way
// back up the tree.
struct SplitSlot {
  std::vector<ErfEdge> lower;
  std::vector<ErfEdge> upper;
  std::vector<double> factor;
  std::vector<ErfEdge> mid;
  int level = 0;
  std::uint64_t index = 0;
};

enum class TaskKind { kVisit, kEnterSecond, kRestore };

struct Task {
  TaskKind kind;
  std::uint64_t n;
  double mass;
  Index axis;
  std::size_t slot;
};

SampleRun sample_incremental(const GaussianPsdModel& model,
                             const HyperRectangle& q,
                             const SamplerParams& params) {
  const DyadicFrame frame(q, params.rho);
  const Index d = model.dim();
  const PairSet pairs = build_pair_set(model);
  const Index np = pairs.count;
  const auto sz = [](Index v) { return static_cast<std::size_t>(v); };

  IntegralAccounting acct;
  RunState state(frame, params.seed, params.n);

  // Per (pair, axis): erf edges of the current cell and their difference.
  std::vector<ErfEdge> lower(sz(np * d));
  std::vector<ErfEdge> upper(sz(np * d));
  std::vector<double> factor(sz(np * d));
  CompensatedSum root_sum;
  for (Index p = 0; p < np; ++p) {
    double prod = pairs.weight[sz(p)];
    for (Index k = 0; k < d; ++k) {
      const std::size_t at = sz(p * d + k);
      const double s = pairs.root_2eta[sz(k)];
      lower[at] = make_edge(s * (q.lower(k) - pairs.mean[at]), acct.erf_calls);
      upper[at] = make_edge(s * (q.upper(k) - pairs.mean[at]), acct.erf_calls);
      factor[at] = erf_diff(lower[at], upper[at]);
      prod *= factor[at];
    }
    root_sum.add(prod);
  }
  acct.integral_evals += 1;
  const double root_mass = std::max(0.0, root_sum.value());
  if (!(root_mass > 0.0)) {
    throw EmptyMassError("model has zero mass on the sampling rectangle");
  }

  std::vector<SplitSlot> slots;
  std::size_t slot_top = 0;
  std::vector<Task> stack;
  if (params.n > 0) stack.push_back({TaskKind::kVisit, params.n, root_mass, 0, 0});

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const auto axis = sz(task.axis);

    if (task.kind == TaskKind::kRestore) {
      SplitSlot& slot = slots[task.slot];
      for (Index p = 0; p < np; ++p) {
        const std::size_t at = sz(p * d) + axis;
        lower[at] = slot.lower[sz(p)];
        upper[at] = slot.upper[sz(p)];
        factor[at] = slot.factor[sz(p)];
      }
      state.levels[axis] = slot.level;
      state.indices[axis] = slot.index;
      --slot_top;
      continue;
    }

    if (task.kind == TaskKind::kEnterSecond) {
      SplitSlot& slot = slots[task.slot];
      for (Index p = 0; p < np; ++p) {
        const std::size_t at = sz(p * d) + axis;
        lower[at] = slot.mid[sz(p)];
        upper[at] = slot.upper[sz(p)];
        factor[at] = erf_diff(lower[at], upper[at]);
      }
      state.levels[axis] = slot.level + 1;
      state.indices[axis] = 2 * slot.index + 1;
      stack.push_back({TaskKind::kVisit, task.n, task.mass, 0, 0});
      continue;
    }

    // Visit
    const Index k = frame.split_axis(state.levels);
    if (k < 0 || !(task.mass > 0.0)) {
      // Leaf, or mass below representable precision: uniform on the cell.
      state.emit_uniform(task.n);
      continue;
    }
    const auto uk = sz(k);
    if (slot_top == slots.size()) {
      slots.emplace_back();
      SplitSlot& fresh = slots.back();
      fresh.lower.resize(sz(np));
      fresh.upper.resize(sz(np));
      fresh.factor.resize(sz(np));
      fresh.mid.resize(sz(np));
    }
    const std::size_t slot_id = slot_top++;
    SplitSlot& slot = slots[slot_id];
    slot.level = state.levels[uk];
    slot.index = state.indices[uk];
    const double mid = frame.coordinate(k, slot.level + 1, 2 * slot.index + 1);
    const double s = pairs.root_2eta[uk];

    CompensatedSum first_sum;
    for (Index p = 0; p < np; ++p) {
      const std::size_t base = sz(p * d);
      const std::size_t at = base + uk;
      slot.lower[sz(p)] = lower[at];
      slot.upper[sz(p)] = upper[at];
      slot.factor[sz(p)] = factor[at];
      slot.mid[sz(p)] = make_edge(s * (mid - pairs.mean[at]), acct.erf_calls);
      double prod = pairs.weight[sz(p)] * erf_diff(lower[at], slot.mid[sz(p)]);
      for (Index l = 0; l < d; ++l) {
        if (l != k) prod *= factor[base + sz(l)];
      }
      first_sum.add(prod);
    }
    acct.integral_evals += 1;
    const double first_mass = std::max(0.0, first_sum.value());
    const double prob = branch_probability(first_mass, task.mass);
    const std::uint64_t n_first = sample_binomial(state.rng, task.n, prob);
    const std::uint64_t n_second = task.n - n_first;
    const double second_mass = std::max(0.0, task.mass - first_mass);

    stack.push_back({TaskKind::kRestore, 0, 0.0, k, slot_id});
    if (n_second > 0) {
      stack.push_back({TaskKind::kEnterSecond, n_second, second_mass, k, slot_id});
    }
    if (n_first > 0) {
      for (Index p = 0; p < np; ++p) {
        const std::size_t at = sz(p * d) + uk;
        upper[at] = slot.mid[sz(p)];
        factor[at] = erf_diff(lower[at], upper[at]);
      }
      state.levels[uk] = slot.level + 1;
      state.indices[uk] = 2 * slot.index;
      stack.push_back({TaskKind::kVisit, n_first, first_mass, 0, 0});
    }
  }
  return state.finish(q, params, acct);
}

struct GenericTask {
  std::vector<int> levels;
  std::vector<std::uint64_t> indices;
  std::uint64_t n;
  double mass;
};

SampleRun sample_generic(const BoxIntegrable& density, const HyperRectangle& q,
                         const SamplerParams& params) {
  if (density.dim() != q.dim()) {
    throw ArgumentError("sample: rectangle dimension mismatch");
  }
  const DyadicFrame frame(q, params.rho);
  IntegralAccounting acct;
  RunState state(frame, params.seed, params.n);
  const double root_mass = std::max(0.0, density.integral(q, acct));
  if (!(root_mass > 0.0)) {
    throw EmptyMassError("density has zero mass on the sampling rectangle");
  }

  std::vector<GenericTask> stack;
  if (params.n > 0) {
    stack.push_back({state.levels, state.indices, params.n, root_mass});
  }
  while (!stack.empty()) {
    GenericTask task = std::move(stack.back());
    stack.pop_back();
    state.levels = task.levels;
    state.indices = task.indices;
    const Index k = frame.split_axis(task.levels);
    if (k < 0 || !(task.mass > 0.0)) {
      state.emit_uniform(task.n);
      continue;
    }
    const auto uk = static_cast<std::size_t>(k);
    GenericTask first = task;
    first.levels[uk] += 1;
    first.indices[uk] = 2 * task.indices[uk];
    GenericTask second = task;
    second.levels[uk] += 1;
    second.indices[uk] = 2 * task.indices[uk] + 1;

    first.mass = std::max(
        0.0, density.integral(frame.cell(first.levels, first.indices), acct));
    second.mass = std::max(0.0, task.mass - first.mass);
    first.n = sample_binomial(state.rng, task.n,
                              branch_probability(first.mass, task.mass));
    second.n = task.n - first.n;
    if (second.n > 0) stack.push_back(std::move(second));
    if (first.n > 0) stack.push_back(std::move(first));
  }
  return state.finish(q, params, acct);
}

}  // namespace

SampleRun sample(const GaussianPsdModel& model, const HyperRectangle& q,
                 const SamplerParams& params) {
  if (model.dim() != q.dim()) {
    throw ArgumentError("sample: rectangle dimension mismatch");
  }
  check_sampling_box(q);
  if (params.full_integrals) {
    return sample_generic(PsdModelIntegrand(model), q, params);
  }
  return sample_incremental(model, q, params);
}

SampleRun sample(const BoxIntegrable& density, const HyperRectangle& q,
                 const SamplerParams& params) {
  check_sampling_box(q);
  return sample_generic(density, q, params);
}

namespace {

double rho_from_bounds(double mass, double volume, double epsilon,
                       DistanceMetric metric, const LipschitzBounds& lip) {
  if (metric == DistanceMetric::kTotalVariation) {
    if (!(lip.lip_f > 0.0)) {
      throw DegenerateModelError("Lipschitz bound is zero; model is degenerate");
    }
    return mass * epsilon / (volume * lip.lip_f);
  }
  if (!lip.lip_sqrt_f) {
    throw UnsupportedError("Hellinger-adaptive rho needs a rank-one model");
  }
  if (!(*lip.lip_sqrt_f > 0.0)) {
    throw DegenerateModelError("Lipschitz bound is zero; model is degenerate");
  }
  return std::sqrt(mass) * epsilon / (std::sqrt(volume) * *lip.lip_sqrt_f);
}

void check_rho_inputs(const HyperRectangle& q, Index d, double epsilon) {
  if (!(epsilon > 0.0)) throw ArgumentError("adaptive_rho: epsilon must be > 0");
  if (q.dim() != d) throw ArgumentError("adaptive_rho: dimension mismatch");
  if (!q.is_bounded()) throw DomainError("adaptive_rho: rectangle is unbounded");
}

}  // namespace

double adaptive_rho(const GaussianPsdModel& model, const HyperRectangle& q,
                    double epsilon, DistanceMetric metric) {
  check_rho_inputs(q, model.dim(), epsilon);
  if (metric == DistanceMetric::kHellinger) {
    throw UnsupportedError("Hellinger-adaptive rho needs a rank-one model");
  }
  return rho_from_bounds(integrate(model, q), q.volume(), epsilon, metric,
                         lipschitz_bounds(model));
}

double adaptive_rho(const RankOneModel& model, const HyperRectangle& q,
                    double epsilon, DistanceMetric metric) {
  check_rho_inputs(q, model.dim(), epsilon);
  return rho_from_bounds(integrate(model.to_psd(), q), q.volume(), epsilon,
                         metric, lipschitz_bounds(model));
}

HyperRectangle find_support(const GaussianPsdModel& model, double eps_mass) {
  if (!(eps_mass > 0.0 && eps_mass < 1.0)) {
    throw ArgumentError("find_support: eps_mass must lie in (0, 1)");
  }
  const Index d = model.dim();
  const double total = integrate(model, HyperRectangle::whole_space(d));
  if (!(total > 0.0)) throw EmptyMassError("find_support: model has zero mass");

  const Vector& eta = model.precision().values();
  const HyperRectangle hull = center_bounding_box(model.centers());
  Vector lo = hull.lower();
  Vector hi = hull.upper();
  for (Index k = 0; k < d; ++k) {
    if (hi[k] - lo[k] <= 0.0) {
      const double half = 1.0 / std::sqrt(2.0 * eta[k]);
      lo[k] -= half;
      hi[k] += half;
    }
  }
  HyperRectangle box(lo, hi);

  // Tail bound with delta_k = t / sqrt(2 eta_k): outside mass
  // <= C d e^{-t^2} S. Pick t so this is <= eps_mass * total; the doubled
  // box contains Q_delta after `needed` steps.
  const TailBox unit = tail_box(model, Vector::Zero(d));
  const double ratio = unit.bound / (eps_mass * total);
  const double t = ratio > 1.0 ? std::sqrt(std::log(ratio)) : 0.0;
  int needed = 0;
  for (Index k = 0; k < d; ++k) {
    const double target = hull.side(k) + 2.0 * t / std::sqrt(2.0 * eta[k]);
    const double start = hi[k] - lo[k];
    if (target > start) {
      needed = std::max(needed, static_cast<int>(std::ceil(std::log2(target / start))));
    }
  }
  const int limit = std::min(200, needed + 2);

  for (int step = 0;; ++step) {
    if (integrate(model, box) / total >= 1.0 - eps_mass) return box;
    if (step >= limit) {
      throw InternalError("find_support: doubling did not reach the target mass");
    }
    box = box.doubled();
  }
}

}  // namespace psd
