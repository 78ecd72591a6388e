#include "psd/model.hpp"

#include <cmath>
#include <numbers>

#include "psd/errors.hpp"

namespace psd {

namespace {

void check_shapes(Index m_coeff, const CenterMatrix& x,
                  const PrecisionVector& eta) {
  if (m_coeff != x.rows()) {
    throw ArgumentError("coefficient size does not match number of centers");
  }
  if (x.dim() != eta.dim()) {
    throw ArgumentError("center dimension does not match precision dimension");
  }
}

}  // namespace

GaussianPsdModel::GaussianPsdModel(Matrix a, CenterMatrix centers,
                                   PrecisionVector eta, PsdRepair repair)
    : a_(std::move(a)), x_(std::move(centers)), eta_(std::move(eta)) {
  if (a_.rows() != a_.cols()) {
    throw ArgumentError("coefficient matrix must be square");
  }
  check_shapes(a_.rows(), x_, eta_);
  if (!a_.allFinite()) {
    throw ArgumentError("coefficient matrix has non-finite entries");
  }
  const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    if (repair == PsdRepair::kReject) {
      throw ArgumentError("coefficient matrix is not symmetric");
    }
  }
  a_ = 0.5 * (a_ + a_.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kPsdTolerance) {
    if (repair == PsdRepair::kReject) {
      throw ArgumentError("coefficient matrix is not positive semi-definite");
    }
    a_ = project_psd(a_);
  }
}

double GaussianPsdModel::operator()(const Eigen::Ref<const Vector>& x) const {
  return evaluate(*this, x);
}

RankOneModel::RankOneModel(Vector a, CenterMatrix centers, PrecisionVector eta)
    : a_(std::move(a)), x_(std::move(centers)), eta_(std::move(eta)) {
  check_shapes(a_.size(), x_, eta_);
  if (!a_.allFinite()) {
    throw ArgumentError("rank-one weights have non-finite entries");
  }
}

GaussianPsdModel RankOneModel::to_psd() const {
  return GaussianPsdModel(a_ * a_.transpose(), x_, eta_);
}

double evaluate(const GaussianPsdModel& model,
                const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.dim()) {
    throw ArgumentError("evaluate: point dimension mismatch");
  }
  const Vector k = kernel_vector(model.precision(), model.centers(), x);
  const double value = k.dot(model.coefficients() * k);
  return value > 0.0 ? value : 0.0;
}

double linear_evaluate(const RankOneModel& model,
                       const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.dim()) {
    throw ArgumentError("linear_evaluate: point dimension mismatch");
  }
  return kernel_vector(model.precision(), model.centers(), x)
      .dot(model.weights());
}

double evaluate(const RankOneModel& model, const Eigen::Ref<const Vector>& x) {
  const double g = linear_evaluate(model, x);
  return g * g;
}

double weighted_operator_norm(const GaussianPsdModel& model) {
  const Matrix k = kernel_matrix(model.precision(), model.centers(),
                                 model.centers());
  const Matrix root = psd_sqrt(k);
  const Matrix m = root * model.coefficients() * root;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

double isotropic_tau(const PrecisionVector& eta) {
  if (!eta.is_isotropic()) {
    throw UnsupportedError(
        "Lipschitz bounds are only available for isotropic precision");
  }
  return eta[0];
}

}  // namespace

LipschitzBounds lipschitz_bounds(const GaussianPsdModel& model) {
  const double tau = isotropic_tau(model.precision());
  const double d = static_cast<double>(model.dim());
  return {std::sqrt(8.0 * tau) * d * weighted_operator_norm(model),
          std::nullopt};
}

LipschitzBounds lipschitz_bounds(const RankOneModel& model) {
  const double tau = isotropic_tau(model.precision());
  const double d = static_cast<double>(model.dim());
  const Matrix k = kernel_matrix(model.precision(), model.centers(),
                                 model.centers());
  // ||K^1/2 a||^2 = a^T K a, and ||K^1/2 a a^T K^1/2|| = a^T K a.
  const double quad = std::max(0.0, model.weights().dot(k * model.weights()));
  LipschitzBounds out;
  out.lip_f = std::sqrt(8.0 * tau) * d * quad;
  out.lip_sqrt_f = std::sqrt(2.0 * tau) * d * std::sqrt(quad);
  return out;
}

HyperRectangle center_bounding_box(const CenterMatrix& centers) {
  const Matrix& x = centers.values();
  return HyperRectangle(x.colwise().minCoeff().transpose(),
                        x.colwise().maxCoeff().transpose());
}

TailBox tail_box(const GaussianPsdModel& model,
                 const Eigen::Ref<const Vector>& delta) {
  const Index d = model.dim();
  if (delta.size() != d) {
    throw ArgumentError("tail_box: delta dimension mismatch");
  }
  if (!delta.allFinite() || (delta.array() < 0.0).any()) {
    throw ArgumentError("tail_box: delta must be finite and >= 0");
  }
  const HyperRectangle hull = center_bounding_box(model.centers());
  HyperRectangle box(hull.lower() - delta, hull.upper() + delta);

  const Vector& eta = model.precision().values();
  double det_2eta = 1.0;
  double tail_sum = 0.0;
  for (Index k = 0; k < d; ++k) {
    det_2eta *= 2.0 * eta[k];
    tail_sum += std::exp(-2.0 * eta[k] * delta[k] * delta[k]);
  }
  const double prefactor = 2.0 *
                           std::pow(std::numbers::pi, 0.5 * static_cast<double>(d)) /
                           std::sqrt(det_2eta) * tail_sum;
  const Matrix k_half = kernel_matrix(model.precision().scaled(0.5),
                                      model.centers(), model.centers());
  const double weight = model.coefficients().cwiseProduct(k_half).sum();
  return {std::move(box), prefactor * weight};
}

}  // namespace psd
