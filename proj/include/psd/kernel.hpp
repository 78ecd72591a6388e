#pragma once

// Gaussian kernel primitives shared by every other module.
//
//   k_eta(x, y) = exp(-(x - y)^T diag(eta) (x - y))

#include <Eigen/Dense>

namespace psd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Per-coordinate kernel precision. All entries strictly positive and finite.
class PrecisionVector {
 public:
  explicit PrecisionVector(Vector eta);

  static PrecisionVector isotropic(double tau, Index d);

  Index dim() const { return eta_.size(); }
  const Vector& values() const { return eta_; }
  double operator[](Index k) const { return eta_[k]; }

  /// True when every entry equals the first one exactly.
  bool is_isotropic() const;

  /// Returns eta * factor (factor > 0).
  PrecisionVector scaled(double factor) const;

 private:
  Vector eta_;
};

/// m x d matrix whose rows are kernel centers. m >= 1, d >= 1, finite.
class CenterMatrix {
 public:
  explicit CenterMatrix(Matrix x);

  Index rows() const { return x_.rows(); }
  Index dim() const { return x_.cols(); }
  const Matrix& values() const { return x_; }
  auto row(Index i) const { return x_.row(i); }

 private:
  Matrix x_;
};

/// Values below this are flushed to zero by the kernel routines.
inline constexpr double kKernelUnderflow = 1e-300;

double kernel(const PrecisionVector& eta, const Eigen::Ref<const Vector>& x,
              const Eigen::Ref<const Vector>& y);

/// [K]_ij = k_eta(x_i, y_j) for the rows of x and y.
Matrix kernel_matrix(const PrecisionVector& eta,
                     const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Matrix>& y);

Matrix kernel_matrix(const PrecisionVector& eta, const CenterMatrix& x,
                     const CenterMatrix& y);

/// Kernel vector (k_eta(x, c_1), ..., k_eta(x, c_m)) against the centers.
Vector kernel_vector(const PrecisionVector& eta, const CenterMatrix& centers,
                     const Eigen::Ref<const Vector>& x);

double erf(double x);
double erfc(double x);

/// Frobenius-nearest PSD matrix: eigendecompose, clamp negative eigenvalues,
/// reconstruct. Inputs with asymmetry up to 1e-10 are symmetrized first.
Matrix project_psd(const Eigen::Ref<const Matrix>& m);

/// Principal square root of a symmetric PSD matrix (negative eigenvalues
/// from roundoff are clamped).
Matrix psd_sqrt(const Eigen::Ref<const Matrix>& m);

}  // namespace psd
