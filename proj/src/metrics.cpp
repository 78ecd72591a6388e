#include "psd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "detail/erf_edge.hpp"
#include "psd/errors.hpp"
#include "psd/quadrature.hpp"

namespace psd {

using detail::CompensatedSum;

DyadicDensity::DyadicDensity(const BoxIntegrable& density, const HyperRectangle& q,
                             double rho, std::uint64_t leaf_cap)
    : frame_(q, rho) {
  if (density.dim() != q.dim()) {
    throw ArgumentError("dyadic_density: dimension mismatch");
  }
  const int depth = frame_.total_depth();
  if (depth >= 63 || (std::uint64_t{1} << depth) > leaf_cap) {
    throw ResourceError("dyadic_density: 2^" + std::to_string(depth) +
                        " leaves exceed the cap of " + std::to_string(leaf_cap));
  }
  for (Index k = 0; k < q.dim(); ++k) levels_.push_back(frame_.depth(k));

  IntegralAccounting acct;
  total_ = density.integral(q, acct);
  if (!(total_ > 0.0)) throw EmptyMassError("dyadic_density: zero mass on Q");
  const std::uint64_t count = std::uint64_t{1} << depth;
  masses_.resize(count);
  for (std::uint64_t leaf = 0; leaf < count; ++leaf) {
    masses_[leaf] = density.integral(leaf_box(leaf), acct) / total_;
  }
}

std::vector<std::uint64_t> DyadicDensity::leaf_indices(std::uint64_t leaf) const {
  std::vector<std::uint64_t> idx(levels_.size());
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    idx[k] = leaf & ((std::uint64_t{1} << levels_[k]) - 1);
    leaf >>= levels_[k];
  }
  return idx;
}

HyperRectangle DyadicDensity::leaf_box(std::uint64_t leaf) const {
  return frame_.cell(levels_, leaf_indices(leaf));
}

std::uint64_t DyadicDensity::leaf_of(const Eigen::Ref<const Vector>& x) const {
  const HyperRectangle& root = frame_.root();
  std::uint64_t leaf = 0;
  int shift = 0;
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    const auto kk = static_cast<Index>(k);
    const int level = levels_[k];
    const std::uint64_t cells = std::uint64_t{1} << level;
    const double t = (x[kk] - root.lower(kk)) / root.side(kk);
    double guess = std::floor(std::ldexp(t, level));
    guess = std::clamp(guess, 0.0, static_cast<double>(cells - 1));
    auto i = static_cast<std::uint64_t>(guess);
    while (i > 0 && x[kk] < frame_.coordinate(kk, level, i)) --i;
    while (i + 1 < cells && x[kk] >= frame_.coordinate(kk, level, i + 1)) ++i;
    leaf |= i << shift;
    shift += level;
  }
  return leaf;
}

double DyadicDensity::value(const Eigen::Ref<const Vector>& x) const {
  if (!frame_.root().contains(x)) return 0.0;
  const std::uint64_t leaf = leaf_of(x);
  return masses_[leaf] / leaf_box(leaf).volume();
}

double DyadicDensity::cdf(double x) const {
  if (levels_.size() != 1) throw UnsupportedError("cdf: d = 1 only");
  const HyperRectangle& root = frame_.root();
  if (x <= root.lower(0)) return 0.0;
  if (x >= root.upper(0)) return 1.0;
  Vector point(1);
  point[0] = x;
  const std::uint64_t leaf = leaf_of(point);
  CompensatedSum s;
  for (std::uint64_t j = 0; j < leaf; ++j) s.add(masses_[j]);
  const HyperRectangle box = leaf_box(leaf);
  s.add(masses_[leaf] * (x - box.lower(0)) / box.side(0));
  return std::min(1.0, s.value());
}

DyadicDensity dyadic_density(const GaussianPsdModel& model, const HyperRectangle& q,
                             double rho, std::uint64_t leaf_cap) {
  return DyadicDensity(PsdModelIntegrand(model), q, rho, leaf_cap);
}

namespace {

// I([lo, t)) / I(Q) for a leaf starting at lo; d = 1 only.
using CdfIncrement = std::function<double(double lo, double t)>;

DistanceReport distances(const BoxIntegrable& density, const HyperRectangle& q,
                         double rho, const CdfIncrement& increment) {
  const Index d = q.dim();
  if (d > 2) throw UnsupportedError("exact_distances: d <= 2 only");
  const DyadicDensity dyadic(density, q, rho);
  const double total = dyadic.total_mass();
  const QuadratureOptions opts{1e-9, 12};

  CompensatedSum tv;
  CompensatedSum h2;
  CompensatedSum w1;
  for (std::uint64_t leaf = 0; leaf < dyadic.leaf_count(); ++leaf) {
    const HyperRectangle box = dyadic.leaf_box(leaf);
    const double level = dyadic.mass(leaf) / box.volume();
    const double root_level = std::sqrt(level);
    tv.add(quadrature_box(
        [&](const Vector& x) { return std::fabs(density.value(x) / total - level); },
        box, opts));
    h2.add(quadrature_box(
        [&](const Vector& x) {
          const double r = std::sqrt(density.value(x) / total) - root_level;
          return r * r;
        },
        box, opts));
    if (d == 1) {
      const double lo = box.lower(0);
      const double width = box.side(0);
      const double mass = dyadic.mass(leaf);
      // Both CDFs agree at the leaf's left edge, so only the in-leaf
      // increments matter.
      w1.add(quadrature_1d(
          [&](double t) {
            if (t <= lo) return 0.0;
            return std::fabs(increment(lo, t) - mass * (t - lo) / width);
          },
          lo, box.upper(0), opts));
    }
  }
  DistanceReport out;
  out.tv = tv.value();
  out.hellinger = std::sqrt(std::max(0.0, h2.value()));
  if (d == 1) out.w1 = w1.value();
  return out;
}

// Symmetric pair form of a 1-D model, f(x) = sum_p w_p exp(-2 eta (x - c_p)^2),
// so int_lo^t f = sum_p w_p sqrt(pi / (8 eta)) [erf(s (t - c_p)) - erf(s (lo - c_p))].
struct PairCdf {
  std::vector<double> weight;
  std::vector<double> mid;
  double s = 0.0;
  double total = 0.0;

  PairCdf(const GaussianPsdModel& model, double mass) : total(mass) {
    const double eta = model.precision()[0];
    const Matrix& a = model.coefficients();
    const Matrix& x = model.centers().values();
    s = std::sqrt(2.0 * eta);
    const double c = 0.5 * std::sqrt(M_PI / (2.0 * eta));
    for (Index i = 0; i < a.rows(); ++i) {
      for (Index j = i; j < a.rows(); ++j) {
        const double diff = x(i, 0) - x(j, 0);
        const double w = (i == j ? 1.0 : 2.0) * a(i, j) * std::exp(-0.5 * eta * diff * diff);
        if (w == 0.0) continue;
        weight.push_back(c * w);
        mid.push_back(0.5 * (x(i, 0) + x(j, 0)));
      }
    }
  }

  double operator()(double lo, double t) const {
    CompensatedSum acc;
    std::uint64_t calls = 0;
    for (std::size_t p = 0; p < weight.size(); ++p) {
      acc.add(weight[p] * detail::erf_diff(detail::make_edge(s * (lo - mid[p]), calls),
                                           detail::make_edge(s * (t - mid[p]), calls)));
    }
    return acc.value() / total;
  }
};

}  // namespace

DistanceReport exact_distances(const BoxIntegrable& density, const HyperRectangle& q,
                               double rho) {
  IntegralAccounting acct;
  const double total = density.integral(q, acct);
  return distances(density, q, rho, [&](double lo, double t) {
    const HyperRectangle part(Vector::Constant(1, lo), Vector::Constant(1, t));
    return density.integral(part, acct) / total;
  });
}

namespace {

// Pointwise values through the linear form, which avoids the cancellation
// of the quadratic form when the weights are large.
class RankOneIntegrand final : public BoxIntegrable {
 public:
  RankOneIntegrand(const RankOneModel& model, const GaussianPsdModel& psd)
      : model_(model), psd_(psd) {}
  Index dim() const override { return model_.dim(); }
  double value(const Eigen::Ref<const Vector>& x) const override {
    return evaluate(model_, x);
  }
  double integral(const HyperRectangle& q, IntegralAccounting& acct) const override {
    return integrate(psd_, q, acct);
  }

 private:
  const RankOneModel& model_;
  const GaussianPsdModel& psd_;
};

DistanceReport model_distances(const BoxIntegrable& integrand,
                               const GaussianPsdModel& model, const HyperRectangle& q,
                               double rho, double mass) {
  DistanceReport out;
  if (q.dim() == 1) {
    const PairCdf cdf(model, mass);
    out = distances(integrand, q, rho, cdf);
  } else {
    out = distances(integrand, q, rho, nullptr);
  }
  if (model.precision().is_isotropic()) {
    out.tv_bound = q.volume() / mass * lipschitz_bounds(model).lip_f * rho;
  }
  if (out.w1) out.w1_bound = std::sqrt(static_cast<double>(q.dim())) * rho;
  return out;
}

}  // namespace

DistanceReport exact_distances(const GaussianPsdModel& model, const HyperRectangle& q,
                               double rho) {
  return model_distances(PsdModelIntegrand(model), model, q, rho, integrate(model, q));
}

DistanceReport exact_distances(const RankOneModel& model, const HyperRectangle& q,
                               double rho) {
  const GaussianPsdModel psd = model.to_psd();
  const double mass = integrate(psd, q);
  DistanceReport out = model_distances(RankOneIntegrand(model, psd), psd, q, rho, mass);
  if (model.precision().is_isotropic()) {
    out.hellinger_bound =
        std::sqrt(q.volume() / mass) * *lipschitz_bounds(model).lip_sqrt_f * rho;
  }
  return out;
}

namespace {

double kernel_sum(const Matrix& x, const Matrix& y, const PrecisionVector& eta) {
  constexpr Index kBlock = 512;
  CompensatedSum s;
  for (Index start = 0; start < x.rows(); start += kBlock) {
    const Index rows = std::min(kBlock, x.rows() - start);
    s.add(kernel_matrix(eta, x.middleRows(start, rows), y).sum());
  }
  return s.value();
}

bool canonical_less(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) return a.rows() < b.rows();
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

double empirical_mmd(const Matrix& p, const Matrix& q, const PrecisionVector& eta) {
  if (p.cols() != q.cols() || p.cols() != eta.dim()) {
    throw ArgumentError("empirical_mmd: dimension mismatch");
  }
  if (p.rows() < 1 || q.rows() < 1) {
    throw ArgumentError("empirical_mmd: need at least one sample per set");
  }
  const bool swap = canonical_less(q, p);
  const Matrix& a = swap ? q : p;
  const Matrix& b = swap ? p : q;
  const auto na = static_cast<double>(a.rows());
  const auto nb = static_cast<double>(b.rows());
  const double saa = kernel_sum(a, a, eta) / (na * na);
  const double sbb = kernel_sum(b, b, eta) / (nb * nb);
  const double sab = kernel_sum(a, b, eta) / (na * nb);
  const double sq = saa + sbb - 2.0 * sab;
  return sq > 0.0 ? std::sqrt(sq) : 0.0;
}

}  // namespace psd
