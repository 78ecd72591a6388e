#pragma once

// Closed-form integration of Gaussian PSD models over hyper-rectangles.
//
// Using k(x,x_i) k(x,x_j) = k_{eta/2}(x_i,x_j) k_{2eta}(x, (x_i+x_j)/2),
//
//   I(Q) = sum_ij A_ij [K_{X,eta/2}]_ij c_{2eta}
//            prod_k [erf(sqrt(2 eta_k) (b_k - xbar_ijk))
//                    - erf(sqrt(2 eta_k) (a_k - xbar_ijk))]
//
// with c_eta = (pi/4)^{d/2} det(diag(eta))^{-1/2}.

#include <cstdint>

#include "psd/box.hpp"
#include "psd/model.hpp"

namespace psd {

/// Work counters. Infinite corners do not count as erf calls.
struct IntegralAccounting {
  std::uint64_t integral_evals = 0;
  std::uint64_t erf_calls = 0;

  void merge(const IntegralAccounting& other) {
    integral_evals += other.integral_evals;
    erf_calls += other.erf_calls;
  }
};

/// A nonnegative function that can be evaluated pointwise and integrated
/// exactly over boxes. Gaussian PSD models are the main implementation;
/// the sampler and the exact metrics only rely on this interface.
class BoxIntegrable {
 public:
  virtual ~BoxIntegrable() = default;
  virtual Index dim() const = 0;
  virtual double value(const Eigen::Ref<const Vector>& x) const = 0;
  virtual double integral(const HyperRectangle& q,
                          IntegralAccounting& acct) const = 0;
};

/// Exact integral of f over Q using 2 d m^2 erf evaluations (finite Q).
double integrate(const GaussianPsdModel& model, const HyperRectangle& q,
                 IntegralAccounting& acct);
double integrate(const GaussianPsdModel& model, const HyperRectangle& q);

inline constexpr std::uint64_t kDefaultSquaredTermCap = 100'000'000;

/// Exact integral of f^2 over Q. Each of the m^4 four-kernel products is
/// reduced to a single Gaussian of precision 4 eta. Throws ResourceError
/// when m^4 exceeds `max_terms`; estimate by Monte Carlo in that case.
double integrate_squared(const GaussianPsdModel& model, const HyperRectangle& q,
                         std::uint64_t max_terms = kDefaultSquaredTermCap);

/// The m^2 x m^2 matrix H with
///   H[(i,j),(k,l)] = int_Q k(x,x_i) k(x,x_j) k(x,x_k) k(x,x_l) dx,
/// indexed column-major (p = i + j m), so that int_Q f^2 = vec(A)^T H vec(A).
Matrix squared_integral_operator(const CenterMatrix& centers,
                                 const PrecisionVector& eta,
                                 const HyperRectangle& q,
                                 std::uint64_t max_terms = kDefaultSquaredTermCap);

/// BoxIntegrable view of a PSD model (holds a reference).
class PsdModelIntegrand final : public BoxIntegrable {
 public:
  explicit PsdModelIntegrand(const GaussianPsdModel& model) : model_(model) {}
  Index dim() const override { return model_.dim(); }
  double value(const Eigen::Ref<const Vector>& x) const override {
    return evaluate(model_, x);
  }
  double integral(const HyperRectangle& q,
                  IntegralAccounting& acct) const override {
    return integrate(model_, q, acct);
  }

 private:
  const GaussianPsdModel& model_;
};

}  // namespace psd
