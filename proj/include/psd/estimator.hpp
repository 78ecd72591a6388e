#pragma once

// Fitting PSD models from pointwise evaluations of an unnormalized density.
//
// Rank-one fit (square-root access g_p ~ sqrt(p)): regularized least squares
//   min_a 1/n sum_i |f(x_i; a) - g_p(x_i)|^2 + lambda a^T K_mm a,
// solved from (K_nm^T K_nm + lambda n K_mm) a = K_nm^T g_n.
//
// General fit (density access f_p ~ p): the convex problem over A >= 0
//   int_X f(x;A)^2 dx - 2 sum_i f_p(x_i) f(x_i;A) + lambda ||K^1/2 A K^1/2||_F^2.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "psd/box.hpp"
#include "psd/model.hpp"
#include "psd/sampler.hpp"

namespace psd {

struct FitConfig {
  std::uint64_t n = 1000;  // evaluation points
  Index m = 50;            // centers
  double tau = 1.0;        // isotropic kernel precision
  double lambda = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class OracleMode {
  kSquareRoot,  // returns g_p(x), proportional to sqrt(p); any sign
  kDensity,     // returns f_p(x) >= 0, proportional to p
};

class EvaluationOracle {
 public:
  using Function = std::function<double(const Eigen::Ref<const Vector>&)>;

  EvaluationOracle(Function fn, HyperRectangle domain, OracleMode mode);

  /// Throws ContractViolation on non-finite values, or negative values in
  /// density mode.
  double operator()(const Eigen::Ref<const Vector>& x) const;

  /// Evaluates every row of `points`.
  Vector evaluate_rows(const Matrix& points) const;

  const HyperRectangle& domain() const { return domain_; }
  OracleMode mode() const { return mode_; }

 private:
  Function fn_;
  HyperRectangle domain_;
  OracleMode mode_;
};

/// Uniform evaluation points (n x d) and centers (m x d) in the domain,
/// drawn from independent streams derived from cfg.seed.
struct DesignPoints {
  Matrix evaluation;
  Matrix centers;
};

DesignPoints draw_design(const HyperRectangle& domain, const FitConfig& cfg);

struct RankOneFit {
  RankOneModel model;
  double residual_norm = 0.0;  // ||M a - K_nm^T g||
  double rhs_norm = 0.0;       // ||K_nm^T g||
  double jitter = 0.0;         // diagonal added to the factored system, 0 if none
};

RankOneFit fit_rank_one(const EvaluationOracle& oracle, const FitConfig& cfg);

/// Same fit from precomputed values g_i = g_p(x_i) at design.evaluation.
RankOneFit fit_rank_one(const DesignPoints& design, const Vector& values,
                        const FitConfig& cfg);

struct PsdFitOptions {
  int max_iters = 500;
  double tolerance = 1e-6;  // on the gradient-mapping norm / (1 + ||A||_F)
  std::uint64_t max_terms = 20'000'000;
  // Start from the PSD projection of the unconstrained minimizer.
  bool warm_start = true;
};

struct PsdFit {
  GaussianPsdModel model;
  std::vector<double> objective_trace;  // objective at each accepted iterate
  int iterations = 0;
  double gradient_mapping_norm = 0.0;
  bool converged = false;
  std::optional<std::string> warning;
};

PsdFit fit_psd(const EvaluationOracle& oracle, const FitConfig& cfg,
               const PsdFitOptions& options = {});

/// Same fit from precomputed values f_i = f_p(x_i) >= 0.
PsdFit fit_psd(const DesignPoints& design, const Vector& values,
               const HyperRectangle& domain, const FitConfig& cfg,
               const PsdFitOptions& options = {});

/// Objective value of the general fit for coefficient matrix `a`.
double psd_objective(const DesignPoints& design, const Vector& values,
                     const HyperRectangle& domain, const FitConfig& cfg,
                     const Matrix& a);

/// Order-only parameter schedule: (tau, lambda) as prescribed for the
/// target accuracy, and the lower bounds on n and m with every unknown
/// constant set to 1. Not a guarantee.
struct TheoreticalParameters {
  double tau = 0.0;
  double lambda = 0.0;
  double n_lower = 0.0;
  double m_lower = 0.0;
};

TheoreticalParameters theoretical_parameters(double epsilon, int d, int beta,
                                             DistanceMetric mode,
                                             double delta = 0.1);

/// First half of the evaluation points for training, second half held out.
struct ValidationSplit {
  DesignPoints train;
  Vector train_values;
  Matrix test_points;
  Vector test_values;
};

ValidationSplit split_half(const DesignPoints& design, const Vector& values);

struct RankOneSelection {
  double tau = 0.0;
  double lambda = 0.0;
  double validation_error = 0.0;  // held-out mean squared error
  RankOneFit fit;                 // refit on all points with the winner
};

/// Grid search over (tau, lambda) on a half split, then refit on all points.
RankOneSelection select_rank_one(const DesignPoints& design, const Vector& values,
                                 const FitConfig& base,
                                 const std::vector<double>& taus,
                                 const std::vector<double>& lambdas);

}  // namespace psd
