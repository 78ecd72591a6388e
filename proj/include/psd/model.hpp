#pragma once

// Gaussian PSD models
//
//   f(x; A, X, eta) = sum_ij A_ij k_eta(x, x_i) k_eta(x, x_j),   A >= 0
//
// and their rank-one special case f = (sum_i a_i k_eta(x, x_i))^2.

#include <optional>

#include "psd/box.hpp"
#include "psd/kernel.hpp"

namespace psd {

enum class PsdRepair {
  kReject,   // throw if min eigenvalue < -1e-9
  kProject,  // replace A by its PSD projection when it fails the check
};

/// Eigenvalue floor accepted at model construction.
inline constexpr double kPsdTolerance = 1e-9;

class RankOneModel;

class GaussianPsdModel {
 public:
  GaussianPsdModel(Matrix a, CenterMatrix centers, PrecisionVector eta,
                   PsdRepair repair = PsdRepair::kReject);

  const Matrix& coefficients() const { return a_; }
  const CenterMatrix& centers() const { return x_; }
  const PrecisionVector& precision() const { return eta_; }
  Index size() const { return x_.rows(); }
  Index dim() const { return x_.dim(); }

  /// f(x), clamped at zero.
  double operator()(const Eigen::Ref<const Vector>& x) const;

 private:
  Matrix a_;
  CenterMatrix x_;
  PrecisionVector eta_;
};

class RankOneModel {
 public:
  RankOneModel(Vector a, CenterMatrix centers, PrecisionVector eta);

  const Vector& weights() const { return a_; }
  const CenterMatrix& centers() const { return x_; }
  const PrecisionVector& precision() const { return eta_; }
  Index size() const { return x_.rows(); }
  Index dim() const { return x_.dim(); }

  /// The induced PSD model with A = a a^T.
  GaussianPsdModel to_psd() const;

 private:
  Vector a_;
  CenterMatrix x_;
  PrecisionVector eta_;
};

double evaluate(const GaussianPsdModel& model,
                const Eigen::Ref<const Vector>& x);

/// Square of the linear model.
double evaluate(const RankOneModel& model, const Eigen::Ref<const Vector>& x);

/// Signed value sum_i a_i k_eta(x, x_i).
double linear_evaluate(const RankOneModel& model,
                       const Eigen::Ref<const Vector>& x);

struct LipschitzBounds {
  double lip_f = 0.0;
  std::optional<double> lip_sqrt_f;  // rank-one models only
};

/// Computable upper bounds on the sup-norm Lipschitz constants
///   Lip(f)     <= sqrt(8 tau) d ||K^1/2 A K^1/2||
///   Lip(sqrt f) <= sqrt(2 tau) d ||K^1/2 a||
/// with K the kernel matrix of the centers. Requires eta = tau * 1.
LipschitzBounds lipschitz_bounds(const GaussianPsdModel& model);
LipschitzBounds lipschitz_bounds(const RankOneModel& model);

/// ||K^1/2 A K^1/2||_op via the symmetric eigensolver.
double weighted_operator_norm(const GaussianPsdModel& model);

struct TailBox {
  HyperRectangle box;
  double bound;  // upper bound on the model mass outside `box`
};

/// Center bounding box inflated by delta_k per side, with the closed-form
/// bound
///   2 pi^{d/2} det(diag(2 eta))^{-1/2} sum_k exp(-2 eta_k delta_k^2)
///     * sum_ij [A o K_{X, eta/2}]_ij
/// on the mass of f outside it.
TailBox tail_box(const GaussianPsdModel& model,
                 const Eigen::Ref<const Vector>& delta);

/// Smallest box enclosing all centers (zero-width sides allowed).
HyperRectangle center_bounding_box(const CenterMatrix& centers);

}  // namespace psd
