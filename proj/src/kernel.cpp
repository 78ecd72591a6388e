#include "psd/kernel.hpp"

#include <cmath>
#include <string>

#include "psd/errors.hpp"

namespace psd {

PrecisionVector::PrecisionVector(Vector eta) : eta_(std::move(eta)) {
  if (eta_.size() < 1) {
    throw ArgumentError("precision vector must have dimension >= 1");
  }
  for (Index k = 0; k < eta_.size(); ++k) {
    if (!std::isfinite(eta_[k]) || eta_[k] <= 0.0) {
      throw ArgumentError("precision entries must be finite and > 0 (entry " +
                          std::to_string(k) + ")");
    }
  }
}

PrecisionVector PrecisionVector::isotropic(double tau, Index d) {
  return PrecisionVector(Vector::Constant(d, tau));
}

bool PrecisionVector::is_isotropic() const {
  for (Index k = 1; k < eta_.size(); ++k) {
    if (eta_[k] != eta_[0]) return false;
  }
  return true;
}

PrecisionVector PrecisionVector::scaled(double factor) const {
  return PrecisionVector(eta_ * factor);
}

CenterMatrix::CenterMatrix(Matrix x) : x_(std::move(x)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw ArgumentError("center matrix must be at least 1x1");
  }
  if (!x_.allFinite()) {
    throw ArgumentError("center matrix has non-finite entries");
  }
}

namespace {

inline double flush(double v) { return v < kKernelUnderflow ? 0.0 : v; }

}  // namespace

double kernel(const PrecisionVector& eta, const Eigen::Ref<const Vector>& x,
              const Eigen::Ref<const Vector>& y) {
  if (x.size() != eta.dim() || y.size() != eta.dim()) {
    throw ArgumentError("kernel: point dimension does not match precision");
  }
  double q = 0.0;
  for (Index k = 0; k < eta.dim(); ++k) {
    const double diff = x[k] - y[k];
    q += eta[k] * diff * diff;
  }
  return flush(std::exp(-q));
}

Matrix kernel_matrix(const PrecisionVector& eta,
                     const Eigen::Ref<const Matrix>& x,
                     const Eigen::Ref<const Matrix>& y) {
  const Index d = eta.dim();
  if (x.cols() != d || y.cols() != d) {
    throw ArgumentError("kernel_matrix: dimension mismatch");
  }
  Matrix k(x.rows(), y.rows());
  const Vector& e = eta.values();
  for (Index j = 0; j < y.rows(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      double q = 0.0;
      for (Index c = 0; c < d; ++c) {
        const double diff = x(i, c) - y(j, c);
        q += e[c] * diff * diff;
      }
      k(i, j) = flush(std::exp(-q));
    }
  }
  return k;
}

Matrix kernel_matrix(const PrecisionVector& eta, const CenterMatrix& x,
                     const CenterMatrix& y) {
  return kernel_matrix(eta, x.values(), y.values());
}

Vector kernel_vector(const PrecisionVector& eta, const CenterMatrix& centers,
                     const Eigen::Ref<const Vector>& x) {
  const Index d = eta.dim();
  if (x.size() != d || centers.dim() != d) {
    throw ArgumentError("kernel_vector: dimension mismatch");
  }
  const Matrix& c = centers.values();
  const Vector& e = eta.values();
  Vector out(c.rows());
  for (Index i = 0; i < c.rows(); ++i) {
    double q = 0.0;
    for (Index k = 0; k < d; ++k) {
      const double diff = x[k] - c(i, k);
      q += e[k] * diff * diff;
    }
    out[i] = flush(std::exp(-q));
  }
  return out;
}

// libm's erf/erfc are rational minimax approximations accurate to ~1 ulp.
double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

Matrix project_psd(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) {
    throw ArgumentError("project_psd: matrix must be square");
  }
  if (!m.allFinite()) {
    throw ArgumentError("project_psd: non-finite entries");
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw ArgumentError("project_psd: matrix is not symmetric");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("project_psd: eigendecomposition failed");
  }
  const Vector lambda = eig.eigenvalues().cwiseMax(0.0);
  const Matrix& v = eig.eigenvectors();
  Matrix out = v * lambda.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix psd_sqrt(const Eigen::Ref<const Matrix>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("psd_sqrt: eigendecomposition failed");
  }
  const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = eig.eigenvectors();
  return v * root.asDiagonal() * v.transpose();
}

}  // namespace psd
