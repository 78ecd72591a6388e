#include "psd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "psd/errors.hpp"
#include "psd/integration.hpp"
#include "psd/rng.hpp"

namespace psd {

void FitConfig::validate() const {
  if (m < 1) throw ArgumentError("fit: m must be >= 1");
  if (n < static_cast<std::uint64_t>(m)) {
    throw ArgumentError("fit: need n >= m evaluation points");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ArgumentError("fit: tau must be finite and > 0");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("fit: lambda must be finite and > 0");
  }
}

EvaluationOracle::EvaluationOracle(Function fn, HyperRectangle domain,
                                   OracleMode mode)
    : fn_(std::move(fn)), domain_(std::move(domain)), mode_(mode) {
  if (!fn_) throw ArgumentError("oracle: empty function");
}

double EvaluationOracle::operator()(const Eigen::Ref<const Vector>& x) const {
  const double v = fn_(x);
  if (!std::isfinite(v)) {
    throw ContractViolation("oracle returned a non-finite value");
  }
  if (mode_ == OracleMode::kDensity && v < 0.0) {
    throw ContractViolation("density oracle returned a negative value");
  }
  return v;
}

Vector EvaluationOracle::evaluate_rows(const Matrix& points) const {
  Vector out(points.rows());
  Vector x(points.cols());
  for (Index i = 0; i < points.rows(); ++i) {
    x = points.row(i).transpose();
    out[i] = (*this)(x);
  }
  return out;
}

namespace {

Matrix uniform_points(const HyperRectangle& domain, Index count,
                      std::uint64_t seed) {
  if (!domain.is_bounded()) {
    throw DomainError("fit: the oracle domain must be bounded");
  }
  Xoshiro256 rng(seed);
  const Index d = domain.dim();
  Matrix out(count, d);
  for (Index i = 0; i < count; ++i) {
    for (Index k = 0; k < d; ++k) {
      out(i, k) = domain.lower(k) + domain.side(k) * rng.uniform();
    }
  }
  return out;
}

constexpr Index kRowBlock = 2048;

}  // namespace

DesignPoints draw_design(const HyperRectangle& domain, const FitConfig& cfg) {
  cfg.validate();
  return {uniform_points(domain, static_cast<Index>(cfg.n), derive_seed(cfg.seed, 1)),
          uniform_points(domain, cfg.m, derive_seed(cfg.seed, 2))};
}

RankOneFit fit_rank_one(const EvaluationOracle& oracle, const FitConfig& cfg) {
  if (oracle.mode() != OracleMode::kSquareRoot) {
    throw ArgumentError("fit_rank_one needs a square-root (g_p) oracle");
  }
  const DesignPoints design = draw_design(oracle.domain(), cfg);
  return fit_rank_one(design, oracle.evaluate_rows(design.evaluation), cfg);
}

RankOneFit fit_rank_one(const DesignPoints& design, const Vector& values,
                        const FitConfig& cfg) {
  cfg.validate();
  const Index n = design.evaluation.rows();
  const Index m = design.centers.rows();
  const Index d = design.centers.cols();
  if (n < m) throw ArgumentError("fit_rank_one: need n >= m");
  if (values.size() != n || design.evaluation.cols() != d) {
    throw ArgumentError("fit_rank_one: design/value shape mismatch");
  }
  const PrecisionVector eta = PrecisionVector::isotropic(cfg.tau, d);
  const Matrix k_mm = kernel_matrix(eta, design.centers, design.centers);

  Matrix gram = Matrix::Zero(m, m);
  Vector rhs = Vector::Zero(m);
  for (Index start = 0; start < n; start += kRowBlock) {
    const Index rows = std::min(kRowBlock, n - start);
    const Matrix k_block =
        kernel_matrix(eta, design.evaluation.middleRows(start, rows), design.centers);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(k_block.transpose());
    rhs.noalias() += k_block.transpose() * values.segment(start, rows);
  }
  const double reg = cfg.lambda * static_cast<double>(n);
  Matrix system = gram.selfadjointView<Eigen::Lower>();
  system += reg * k_mm;

  RankOneFit out{RankOneModel(Vector::Zero(m), CenterMatrix(design.centers), eta)};
  out.rhs_norm = rhs.norm();

  // Jitter escalates from 1e-12 * mean diagonal; refinement runs against
  // the unjittered system so the residual check still refers to it.
  Eigen::LLT<Matrix> llt(system);
  const double mean_diag = system.trace() / static_cast<double>(m);
  for (double scale = 1e-12; llt.info() != Eigen::Success; scale *= 100.0) {
    if (scale > 1e-4) {
      throw IllConditionedError("fit_rank_one: system is singular after jitter");
    }
    out.jitter = scale * mean_diag;
    llt.compute(system + out.jitter * Matrix::Identity(m, m));
  }
  Vector a = llt.solve(rhs);
  const double tol = 1e-8 * out.rhs_norm;
  for (int refine = 0; refine < 50; ++refine) {
    const Vector residual = rhs - system * a;
    if (residual.norm() <= 0.1 * tol) break;
    a += llt.solve(residual);
  }
  if (!a.allFinite()) {
    throw IllConditionedError("fit_rank_one: solution is not finite");
  }
  out.residual_norm = (system * a - rhs).norm();
  if (out.residual_norm > tol) {
    throw IllConditionedError(
        "fit_rank_one: normal-equation residual " +
        std::to_string(out.residual_norm) + " exceeds 1e-8 * ||rhs||");
  }
  out.model = RankOneModel(std::move(a), CenterMatrix(design.centers), eta);
  return out;
}

namespace {

// Everything the general fit needs, assembled once.
struct PsdProblem {
  Index m = 0;
  Matrix h;       // m^2 x m^2, int_X f^2 = vec(A)^T H vec(A)
  Matrix data;    // B = sum_i f_i phi_i phi_i^T
  Matrix k_mm;
  double lambda = 0.0;

  double objective(const Matrix& a) const {
    const Eigen::Map<const Vector> va(a.data(), m * m);
    const double quad = va.dot(h * va);
    const Matrix ka = k_mm * a;
    return quad - 2.0 * a.cwiseProduct(data).sum() +
           lambda * (ka * ka).trace();
  }

  Matrix gradient(const Matrix& a) const {
    const Eigen::Map<const Vector> va(a.data(), m * m);
    Vector hv = h * va;
    Matrix g = Eigen::Map<Matrix>(hv.data(), m, m);
    g = 2.0 * g - 2.0 * data + 2.0 * lambda * (k_mm * a * k_mm);
    return 0.5 * (g + g.transpose());
  }
};

PsdProblem build_problem(const DesignPoints& design, const Vector& values,
                         const HyperRectangle& domain, const FitConfig& cfg,
                         std::uint64_t max_terms) {
  cfg.validate();
  const Index n = design.evaluation.rows();
  const Index m = design.centers.rows();
  const Index d = design.centers.cols();
  if (values.size() != n || design.evaluation.cols() != d || domain.dim() != d) {
    throw ArgumentError("fit_psd: design/value/domain shape mismatch");
  }
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw ContractViolation("fit_psd: density values must be finite and >= 0");
    }
  }
  const PrecisionVector eta = PrecisionVector::isotropic(cfg.tau, d);
  const CenterMatrix centers(design.centers);
  PsdProblem prob;
  prob.m = m;
  prob.lambda = cfg.lambda;
  prob.h = squared_integral_operator(centers, eta, domain, max_terms);
  prob.k_mm = kernel_matrix(eta, centers, centers);
  prob.data = Matrix::Zero(m, m);
  for (Index start = 0; start < n; start += kRowBlock) {
    const Index rows = std::min(kRowBlock, n - start);
    const Matrix k_block =
        kernel_matrix(eta, design.evaluation.middleRows(start, rows), design.centers);
    prob.data.noalias() +=
        k_block.transpose() * values.segment(start, rows).asDiagonal() * k_block;
  }
  prob.data = 0.5 * (prob.data + prob.data.transpose());
  return prob;
}

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double top_eigenvalue(const Matrix& s) {
  Vector v = Vector::Ones(s.rows()).normalized();
  double value = 0.0;
  for (int it = 0; it < 100; ++it) {
    Vector w = s * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::fabs(next - value) <= 1e-10 * std::fabs(next)) return next;
    value = next;
  }
  return value;
}

// Unconstrained minimizer over symmetric matrices, parametrized by the
// upper triangle: (H + lambda K (x) K) vec(A) = vec(B) restricted to
// symmetric A.
Matrix unconstrained_minimizer(const PsdProblem& prob) {
  const Index m = prob.m;
  std::vector<std::pair<Index, Index>> idx;
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i <= j; ++i) idx.emplace_back(i, j);
  }
  const auto ns = static_cast<Index>(idx.size());
  auto positions = [m](std::pair<Index, Index> ij) {
    return std::pair<Index, Index>{ij.first + ij.second * m,
                                   ij.second + ij.first * m};
  };
  auto full_entry = [&](Index p, Index r) {
    const Index i = p % m, j = p / m, k = r % m, l = r / m;
    return prob.h(p, r) + prob.lambda * prob.k_mm(i, k) * prob.k_mm(j, l);
  };
  Matrix reduced(ns, ns);
  Vector rhs(ns);
  for (Index u = 0; u < ns; ++u) {
    const auto [pu1, pu2] = positions(idx[static_cast<std::size_t>(u)]);
    const bool diag_u = pu1 == pu2;
    rhs[u] = diag_u ? prob.data(pu1 % m, pu1 / m)
                    : prob.data(pu1 % m, pu1 / m) + prob.data(pu2 % m, pu2 / m);
    for (Index v = 0; v < ns; ++v) {
      const auto [pv1, pv2] = positions(idx[static_cast<std::size_t>(v)]);
      const bool diag_v = pv1 == pv2;
      double e = full_entry(pu1, pv1);
      if (!diag_v) e += full_entry(pu1, pv2);
      if (!diag_u) {
        e += full_entry(pu2, pv1);
        if (!diag_v) e += full_entry(pu2, pv2);
      }
      reduced(u, v) = e;
    }
  }
  const Vector s = reduced.ldlt().solve(rhs);
  Matrix a = Matrix::Zero(m, m);
  if (!s.allFinite()) return a;
  for (Index u = 0; u < ns; ++u) {
    const auto [i, j] = idx[static_cast<std::size_t>(u)];
    a(i, j) = s[u];
    a(j, i) = s[u];
  }
  return a;
}

}  // namespace

double psd_objective(const DesignPoints& design, const Vector& values,
                     const HyperRectangle& domain, const FitConfig& cfg,
                     const Matrix& a) {
  return build_problem(design, values, domain, cfg, kDefaultSquaredTermCap)
      .objective(a);
}

PsdFit fit_psd(const EvaluationOracle& oracle, const FitConfig& cfg,
               const PsdFitOptions& options) {
  if (oracle.mode() != OracleMode::kDensity) {
    throw ArgumentError("fit_psd needs a density (f_p) oracle");
  }
  const DesignPoints design = draw_design(oracle.domain(), cfg);
  return fit_psd(design, oracle.evaluate_rows(design.evaluation),
                 oracle.domain(), cfg, options);
}

PsdFit fit_psd(const DesignPoints& design, const Vector& values,
               const HyperRectangle& domain, const FitConfig& cfg,
               const PsdFitOptions& options) {
  if (!domain.is_bounded()) throw DomainError("fit_psd: domain must be bounded");
  const PsdProblem prob = build_problem(design, values, domain, cfg, options.max_terms);
  const Index m = prob.m;

  Matrix a = Matrix::Zero(m, m);
  double obj = 0.0;
  if (options.warm_start) {
    Matrix start = project_psd(unconstrained_minimizer(prob));
    const double start_obj = prob.objective(start);
    if (std::isfinite(start_obj) && start_obj < obj) {
      a = std::move(start);
      obj = start_obj;
    }
  }

  const double k_top = top_eigenvalue(prob.k_mm);
  const double lipschitz =
      2.0 * (1.1 * top_eigenvalue(prob.h) + prob.lambda * k_top * k_top);
  const double step_cap = lipschitz > 0.0 ? 64.0 / lipschitz : 1.0;
  double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;

  PsdFit fit{GaussianPsdModel(Matrix::Zero(m, m), CenterMatrix(design.centers),
                              PrecisionVector::isotropic(cfg.tau, design.centers.cols())),
             {}, 0, 0.0, false, std::nullopt};
  fit.objective_trace.push_back(obj);

  for (int it = 0; it < options.max_iters; ++it) {
    const Matrix grad = prob.gradient(a);
    step = std::min(2.0 * step, step_cap);
    bool accepted = false;
    Matrix next;
    double next_obj = 0.0;
    double mapping = 0.0;
    while (step * lipschitz > 1e-12 || lipschitz == 0.0) {
      next = project_psd(a - step * grad);
      const Matrix delta = next - a;
      next_obj = prob.objective(next);
      mapping = delta.norm() / step;
      const double model_bound =
          obj + grad.cwiseProduct(delta).sum() + delta.squaredNorm() / (2.0 * step);
      if (next_obj <= model_bound + 1e-14 * std::fabs(obj)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    fit.iterations = it + 1;
    fit.gradient_mapping_norm = mapping;
    if (!accepted || next_obj > obj) {
      // No representable descent left: the current iterate is optimal to
      // working precision.
      fit.converged = mapping <= options.tolerance * (1.0 + a.norm()) || !accepted ||
                      next_obj - obj <= 1e-12 * std::fabs(obj);
      break;
    }
    a = std::move(next);
    obj = next_obj;
    fit.objective_trace.push_back(obj);
    if (mapping <= options.tolerance * (1.0 + a.norm())) {
      fit.converged = true;
      break;
    }
  }
  if (options.max_iters == 0) {
    const Matrix probe = project_psd(a - step * prob.gradient(a));
    fit.gradient_mapping_norm = (probe - a).norm() / step;
    fit.converged = fit.gradient_mapping_norm <= options.tolerance * (1.0 + a.norm());
  }
  if (!fit.converged) {
    fit.warning = "iteration budget exhausted before the gradient-mapping norm "
                  "reached tolerance";
  }
  fit.model = GaussianPsdModel(std::move(a), CenterMatrix(design.centers),
                               PrecisionVector::isotropic(cfg.tau, design.centers.cols()),
                               PsdRepair::kProject);
  return fit;
}

TheoreticalParameters theoretical_parameters(double epsilon, int d, int beta,
                                             DistanceMetric mode, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ArgumentError("theoretical_parameters: epsilon must lie in (0, 1]");
  }
  if (beta < 1 || d < 1) throw ArgumentError("theoretical_parameters: need d, beta >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw ArgumentError("theoretical_parameters: delta must lie in (0, 1]");
  }
  const double dd = d;
  const double bb = beta;
  const double log_inv = std::log(1.0 / epsilon);
  const double log_d = std::pow(log_inv, dd);
  TheoreticalParameters out;
  out.tau = std::pow(epsilon, -2.0 / bb);
  out.m_lower = std::pow(epsilon, -dd / bb) * log_d * std::log(1.0 / (epsilon * delta));
  if (mode == DistanceMetric::kTotalVariation) {
    out.lambda = std::pow(epsilon, 2.0 + 2.0 * dd / bb);
    out.n_lower = std::pow(epsilon, -2.0 - dd / bb) * log_d * std::log(2.0 / delta);
  } else {
    out.lambda = std::pow(epsilon, 2.0 + dd / bb);
    const double nu = std::min(1.0, dd / (2.0 * bb));
    out.n_lower = std::pow(epsilon, -2.0 * nu) * std::log(8.0 / delta);
  }
  return out;
}

ValidationSplit split_half(const DesignPoints& design, const Vector& values) {
  const Index n = design.evaluation.rows();
  if (values.size() != n) throw ArgumentError("split_half: shape mismatch");
  const Index half = n / 2;
  ValidationSplit s;
  s.train.evaluation = design.evaluation.topRows(half);
  s.train.centers = design.centers;
  s.train_values = values.head(half);
  s.test_points = design.evaluation.bottomRows(n - half);
  s.test_values = values.tail(n - half);
  return s;
}

RankOneSelection select_rank_one(const DesignPoints& design, const Vector& values,
                                 const FitConfig& base,
                                 const std::vector<double>& taus,
                                 const std::vector<double>& lambdas) {
  if (taus.empty() || lambdas.empty()) {
    throw ArgumentError("select_rank_one: empty hyperparameter grid");
  }
  const ValidationSplit split = split_half(design, values);
  double best_err = std::numeric_limits<double>::infinity();
  double best_tau = taus.front();
  double best_lambda = lambdas.front();
  for (double tau : taus) {
    for (double lambda : lambdas) {
      FitConfig cfg = base;
      cfg.tau = tau;
      cfg.lambda = lambda;
      cfg.n = static_cast<std::uint64_t>(split.train.evaluation.rows());
      double err;
      try {
        const RankOneFit fit = fit_rank_one(split.train, split.train_values, cfg);
        const Matrix k = kernel_matrix(fit.model.precision(), split.test_points,
                                       design.centers);
        err = (k * fit.model.weights() - split.test_values).squaredNorm() /
              static_cast<double>(split.test_values.size());
      } catch (const NumericalError&) {
        continue;
      }
      if (err < best_err) {
        best_err = err;
        best_tau = tau;
        best_lambda = lambda;
      }
    }
  }
  if (!std::isfinite(best_err)) {
    throw IllConditionedError("select_rank_one: every candidate fit failed");
  }
  FitConfig cfg = base;
  cfg.tau = best_tau;
  cfg.lambda = best_lambda;
  cfg.n = static_cast<std::uint64_t>(design.evaluation.rows());
  return {best_tau, best_lambda, best_err, fit_rank_one(design, values, cfg)};
}

}  // namespace psd
