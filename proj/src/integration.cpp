#include "psd/integration.hpp"

#include <cmath>
#include <string>

#include "detail/erf_edge.hpp"
#include "psd/errors.hpp"

namespace psd {

using detail::CompensatedSum;
using detail::erf_diff;
using detail::make_edge;

double integrate(const GaussianPsdModel& model, const HyperRectangle& q,
                 IntegralAccounting& acct) {
  const Index d = model.dim();
  if (q.dim() != d) {
    throw ArgumentError("integrate: rectangle dimension mismatch");
  }
  const Index m = model.size();
  const Matrix& a = model.coefficients();
  const Matrix& x = model.centers().values();
  const Vector& eta = model.precision().values();

  Vector root_2eta(d);
  for (Index k = 0; k < d; ++k) root_2eta[k] = std::sqrt(2.0 * eta[k]);
  const double c_2eta = detail::gaussian_box_constant(eta, 2.0);

  std::uint64_t calls = 0;
  CompensatedSum total;
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      double log_k_half = 0.0;
      double box = 1.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        log_k_half -= 0.5 * eta[k] * diff * diff;
        const double mean = 0.5 * (x(i, k) + x(j, k));
        const auto lo = make_edge(root_2eta[k] * (q.lower(k) - mean), calls);
        const auto hi = make_edge(root_2eta[k] * (q.upper(k) - mean), calls);
        box *= erf_diff(lo, hi);
      }
      const double k_half = std::exp(log_k_half);
      if (k_half < kKernelUnderflow) continue;
      total.add(a(i, j) * k_half * box);
    }
  }
  acct.integral_evals += 1;
  acct.erf_calls += calls;
  const double value = c_2eta * total.value();
  return value > 0.0 ? value : 0.0;
}

double integrate(const GaussianPsdModel& model, const HyperRectangle& q) {
  IntegralAccounting scratch;
  return integrate(model, q, scratch);
}

namespace {

struct PairTable {
  Vector weight;  // A_ij k_{eta/2}(x_i, x_j) (or k_{eta/2} alone)
  Matrix mean;    // m^2 x d pair midpoints
};

PairTable build_pairs(const Matrix& x, const Vector& eta, const Matrix* a) {
  const Index m = x.rows();
  const Index d = x.cols();
  PairTable t{Vector(m * m), Matrix(m * m, d)};
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) {
      const Index p = i + j * m;
      double log_k = 0.0;
      for (Index k = 0; k < d; ++k) {
        const double diff = x(i, k) - x(j, k);
        log_k -= 0.5 * eta[k] * diff * diff;
        t.mean(p, k) = 0.5 * (x(i, k) + x(j, k));
      }
      const double kv = std::exp(log_k);
      t.weight[p] = (a ? (*a)(i, j) : 1.0) * (kv < kKernelUnderflow ? 0.0 : kv);
    }
  }
  return t;
}

void check_terms(Index m, std::uint64_t max_terms) {
  const double terms = std::pow(static_cast<double>(m), 4.0);
  if (terms > static_cast<double>(max_terms)) {
    throw ResourceError("integrate_squared: m^4 = " + std::to_string(terms) +
                        " exceeds the term cap; use a Monte Carlo estimate");
  }
}

// int_Q k_eta(x,u) k_eta(x,v)... for two pair midpoints u, v of precision
// 2 eta: k_{2eta}(x,u) k_{2eta}(x,v) = k_eta(u,v) k_{4eta}(x,(u+v)/2).
double pair_pair_integral(const Matrix& mean, Index p, Index r,
                          const Vector& eta, const Vector& root_4eta,
                          const HyperRectangle& q, double c_4eta) {
  const Index d = mean.cols();
  double log_k = 0.0;
  double box = 1.0;
  std::uint64_t unused = 0;
  for (Index k = 0; k < d; ++k) {
    const double diff = mean(p, k) - mean(r, k);
    log_k -= eta[k] * diff * diff;
    const double c = 0.5 * (mean(p, k) + mean(r, k));
    box *= erf_diff(make_edge(root_4eta[k] * (q.lower(k) - c), unused),
                    make_edge(root_4eta[k] * (q.upper(k) - c), unused));
    if (box == 0.0) return 0.0;
  }
  return std::exp(log_k) * c_4eta * box;
}

}  // namespace

double integrate_squared(const GaussianPsdModel& model, const HyperRectangle& q,
                         std::uint64_t max_terms) {
  const Index d = model.dim();
  if (q.dim() != d) {
    throw ArgumentError("integrate_squared: rectangle dimension mismatch");
  }
  const Index m = model.size();
  check_terms(m, max_terms);
  const Vector& eta = model.precision().values();
  const PairTable pairs =
      build_pairs(model.centers().values(), eta, &model.coefficients());
  Vector root_4eta(d);
  for (Index k = 0; k < d; ++k) root_4eta[k] = std::sqrt(4.0 * eta[k]);
  const double c_4eta = detail::gaussian_box_constant(eta, 4.0);

  const Index n_pairs = m * m;
  CompensatedSum total;
  for (Index p = 0; p < n_pairs; ++p) {
    if (pairs.weight[p] == 0.0) continue;
    for (Index r = p; r < n_pairs; ++r) {
      if (pairs.weight[r] == 0.0) continue;
      const double v = pair_pair_integral(pairs.mean, p, r, eta, root_4eta, q,
                                          c_4eta);
      total.add((p == r ? 1.0 : 2.0) * pairs.weight[p] * pairs.weight[r] * v);
    }
  }
  const double value = total.value();
  return value > 0.0 ? value : 0.0;
}

Matrix squared_integral_operator(const CenterMatrix& centers,
                                 const PrecisionVector& eta,
                                 const HyperRectangle& q,
                                 std::uint64_t max_terms) {
  const Index d = centers.dim();
  if (q.dim() != d || eta.dim() != d) {
    throw ArgumentError("squared_integral_operator: dimension mismatch");
  }
  const Index m = centers.rows();
  check_terms(m, max_terms);
  const Vector& e = eta.values();
  const PairTable pairs = build_pairs(centers.values(), e, nullptr);
  Vector root_4eta(d);
  for (Index k = 0; k < d; ++k) root_4eta[k] = std::sqrt(4.0 * e[k]);
  const double c_4eta = detail::gaussian_box_constant(e, 4.0);

  const Index n_pairs = m * m;
  Matrix h = Matrix::Zero(n_pairs, n_pairs);
  for (Index p = 0; p < n_pairs; ++p) {
    if (pairs.weight[p] == 0.0) continue;
    for (Index r = p; r < n_pairs; ++r) {
      if (pairs.weight[r] == 0.0) continue;
      const double v =
          pairs.weight[p] * pairs.weight[r] *
          pair_pair_integral(pairs.mean, p, r, e, root_4eta, q, c_4eta);
      h(p, r) = v;
      h(r, p) = v;
    }
  }
  return h;
}

}  // namespace psd
