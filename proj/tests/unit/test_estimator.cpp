#include <cmath>

#include <gtest/gtest.h>

#include "psd/errors.hpp"
#include "psd/estimator.hpp"
#include "psd/integration.hpp"
#include "test_support.hpp"

namespace psd {
namespace {

FitConfig config(std::uint64_t n, Index m, double tau, double lambda, std::uint64_t seed) {
  FitConfig c;
  c.n = n;
  c.m = m;
  c.tau = tau;
  c.lambda = lambda;
  c.seed = seed;
  return c;
}

TEST(FitConfig, Validation) {
  EXPECT_THROW(config(5, 10, 1, 1e-6, 0).validate(), ArgumentError);
  EXPECT_THROW(config(10, 0, 1, 1e-6, 0).validate(), ArgumentError);
  EXPECT_THROW(config(10, 5, 0, 1e-6, 0).validate(), ArgumentError);
  EXPECT_THROW(config(10, 5, 1, 0, 0).validate(), ArgumentError);
  EXPECT_NO_THROW(config(10, 5, 1, 1e-6, 0).validate());
}

TEST(EvaluationOracle, ContractChecks) {
  const HyperRectangle q = HyperRectangle::cube(0, 1, 1);
  const EvaluationOracle nan([](const Eigen::Ref<const Vector>&) { return NAN; }, q,
                             OracleMode::kSquareRoot);
  EXPECT_THROW(nan(Vector::Zero(1)), ContractViolation);
  const EvaluationOracle neg([](const Eigen::Ref<const Vector>&) { return -1.0; }, q,
                             OracleMode::kDensity);
  EXPECT_THROW(neg(Vector::Zero(1)), ContractViolation);
  const EvaluationOracle signed_ok([](const Eigen::Ref<const Vector>&) { return -1.0; }, q,
                                   OracleMode::kSquareRoot);
  EXPECT_EQ(signed_ok(Vector::Zero(1)), -1.0);
}

TEST(DrawDesign, InsideDomainAndDeterministic) {
  Vector lo(2), hi(2);
  lo << -1.0, 2.0;
  hi << 0.0, 5.0;
  const HyperRectangle q(lo, hi);
  const DesignPoints a = draw_design(q, config(100, 10, 1, 1e-6, 3));
  const DesignPoints b = draw_design(q, config(100, 10, 1, 1e-6, 3));
  EXPECT_EQ(a.evaluation, b.evaluation);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.evaluation.rows(), 100);
  EXPECT_EQ(a.centers.rows(), 10);
  EXPECT_NE(a.evaluation.topRows(10), a.centers);
  for (Index i = 0; i < 100; ++i) EXPECT_TRUE(q.contains(a.evaluation.row(i).transpose()));
  EXPECT_THROW(draw_design(HyperRectangle::whole_space(2), config(100, 10, 1, 1e-6, 3)),
               DomainError);
}

// Target in the span of the design centers: the fit reproduces it.
TEST(FitRankOne, RecoversTargetInCenterSpan) {
  for (Index d : {1, 2}) {
    const HyperRectangle q = HyperRectangle::cube(-1, 1, d);
    const FitConfig cfg = config(2000, 8, 2.0, 1e-12, 17 + d);
    const DesignPoints design = draw_design(q, cfg);
    Xoshiro256 rng(d);
    const RankOneModel truth(testing::random_vector(rng, 8, -1, 1), CenterMatrix(design.centers),
                             PrecisionVector::isotropic(cfg.tau, d));
    const EvaluationOracle oracle(
        [&](const Eigen::Ref<const Vector>& x) { return linear_evaluate(truth, x); }, q,
        OracleMode::kSquareRoot);
    const RankOneFit fit = fit_rank_one(oracle, cfg);
    double se = 0.0;
    for (int t = 0; t < 500; ++t) {
      const Vector x = testing::random_vector(rng, d, -1, 1);
      const double r = linear_evaluate(fit.model, x) - linear_evaluate(truth, x);
      se += r * r;
    }
    EXPECT_LE(std::sqrt(se / 500), 1e-6);
    EXPECT_LE(fit.residual_norm, 1e-8 * fit.rhs_norm);
  }
}

TEST(FitRankOne, SolvesTheNormalEquations) {
  const HyperRectangle q = HyperRectangle::cube(0, 2, 1);
  const FitConfig cfg = config(300, 12, 1.5, 1e-4, 4);
  const DesignPoints design = draw_design(q, cfg);
  Vector g(300);
  for (Index i = 0; i < 300; ++i) g[i] = std::sin(3.0 * design.evaluation(i, 0));
  const RankOneFit fit = fit_rank_one(design, g, cfg);
  const PrecisionVector eta = PrecisionVector::isotropic(cfg.tau, 1);
  const Matrix knm = kernel_matrix(eta, design.evaluation, design.centers);
  const Matrix kmm = kernel_matrix(eta, design.centers, design.centers);
  const Matrix system = knm.transpose() * knm + cfg.lambda * 300.0 * kmm;
  const Vector direct = system.ldlt().solve(knm.transpose() * g);
  const Vector rhs = knm.transpose() * g;
  EXPECT_LE((system * fit.model.weights() - rhs).norm(), 1e-8 * rhs.norm());
  EXPECT_LE((knm * (fit.model.weights() - direct)).norm(), 1e-6 * (knm * direct).norm());
}

TEST(FitRankOne, ZeroTargetGivesZeroWeights) {
  const HyperRectangle q = HyperRectangle::cube(-1, 1, 2);
  const EvaluationOracle zero([](const Eigen::Ref<const Vector>&) { return 0.0; }, q,
                              OracleMode::kSquareRoot);
  const RankOneFit fit = fit_rank_one(zero, config(200, 10, 1.0, 1e-6, 1));
  EXPECT_EQ(fit.model.weights().cwiseAbs().maxCoeff(), 0.0);
  const EvaluationOracle dens([](const Eigen::Ref<const Vector>&) { return 0.0; }, q,
                              OracleMode::kDensity);
  EXPECT_THROW(fit_rank_one(dens, config(200, 10, 1.0, 1e-6, 1)), ArgumentError);
}

// With one center the problem is scalar: A* = max(0, B / (H + lambda K^2)).
TEST(FitPsd, ScalarCaseMatchesClosedForm) {
  const HyperRectangle q = HyperRectangle::cube(-1, 1, 1);
  for (double sign : {1.0, 0.0}) {
    const FitConfig cfg = config(400, 1, 1.0, 1e-3, 8);
    const DesignPoints design = draw_design(q, cfg);
    Vector f(400);
    for (Index i = 0; i < 400; ++i) f[i] = sign * std::exp(-design.evaluation(i, 0) * design.evaluation(i, 0));
    const PsdFit fit = fit_psd(design, f, q, cfg);
    const PrecisionVector eta = PrecisionVector::isotropic(1.0, 1);
    const Matrix h = squared_integral_operator(CenterMatrix(design.centers), eta, q);
    const Vector k = kernel_matrix(eta, design.evaluation, design.centers).col(0);
    const double b = (k.array().square() * f.array()).sum();
    const double expect = std::max(0.0, b / (h(0, 0) + cfg.lambda));
    EXPECT_NEAR(fit.model.coefficients()(0, 0), expect, 1e-8 * std::max(1.0, expect));
    EXPECT_TRUE(fit.converged);
  }
}

TEST(FitPsd, MonotoneDescentAndPsdIterates) {
  Xoshiro256 rng(9);
  const HyperRectangle q = HyperRectangle::cube(-1, 1, 2);
  const FitConfig cfg = config(3000, 10, 2.0, 1e-6, 5);
  const DesignPoints design = draw_design(q, cfg);
  const GaussianPsdModel planted(testing::random_psd(rng, 10, 3), CenterMatrix(design.centers),
                                 PrecisionVector::isotropic(cfg.tau, 2));
  Vector f(3000);
  for (Index i = 0; i < 3000; ++i) f[i] = evaluate(planted, design.evaluation.row(i).transpose());
  for (bool warm : {true, false}) {
    PsdFitOptions opts;
    opts.warm_start = warm;
    opts.max_iters = 300;
    const PsdFit fit = fit_psd(design, f, q, cfg, opts);
    ASSERT_GE(fit.objective_trace.size(), 2u);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
      EXPECT_LE(fit.objective_trace[i], fit.objective_trace[i - 1]);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.model.coefficients());
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9);
    const double obj = psd_objective(design, f, q, cfg, fit.model.coefficients());
    EXPECT_NEAR(obj, fit.objective_trace.back(), 1e-9 * std::fabs(obj));
    EXPECT_LE(obj, psd_objective(design, f, q, cfg, Matrix::Zero(10, 10)));
    if (!fit.converged) {
      EXPECT_TRUE(fit.warning.has_value());
    }
  }
}

TEST(FitPsd, RejectsNegativeValues) {
  const HyperRectangle q = HyperRectangle::cube(-1, 1, 1);
  const FitConfig cfg = config(20, 2, 1.0, 1e-3, 1);
  const DesignPoints design = draw_design(q, cfg);
  Vector f = Vector::Ones(20);
  f[3] = -1.0;
  EXPECT_THROW(fit_psd(design, f, q, cfg), ContractViolation);
}

TEST(TheoreticalParameters, Schedules) {
  const TheoreticalParameters tv =
      theoretical_parameters(0.1, 1, 2, DistanceMetric::kTotalVariation, 0.1);
  EXPECT_NEAR(tv.tau, std::pow(0.1, -1.0), 1e-12);
  EXPECT_NEAR(tv.lambda, std::pow(0.1, 3.0), 1e-15);
  const double l = std::log(10.0);
  EXPECT_NEAR(tv.m_lower, std::pow(0.1, -0.5) * l * std::log(100.0), 1e-9);
  EXPECT_NEAR(tv.n_lower, std::pow(0.1, -2.5) * l * std::log(20.0), 1e-9);
  const TheoreticalParameters h =
      theoretical_parameters(0.1, 4, 1, DistanceMetric::kHellinger, 0.1);
  EXPECT_NEAR(h.lambda, std::pow(0.1, 6.0), 1e-18);
  EXPECT_NEAR(h.n_lower, std::pow(0.1, -2.0) * std::log(80.0), 1e-9);  // nu = 1
  EXPECT_THROW(theoretical_parameters(0.0, 1, 1, DistanceMetric::kHellinger), ArgumentError);
  EXPECT_THROW(theoretical_parameters(0.1, 0, 1, DistanceMetric::kHellinger), ArgumentError);
}

TEST(SelectRankOne, PrefersTheGeneratingScale) {
  const HyperRectangle q = HyperRectangle::cube(-1, 1, 1);
  const FitConfig cfg = config(600, 6, 1.0, 1e-6, 12);
  const DesignPoints design = draw_design(q, cfg);
  const RankOneModel truth(Vector::LinSpaced(6, -1.0, 1.0), CenterMatrix(design.centers),
                           PrecisionVector::isotropic(4.0, 1));
  Vector g(600);
  for (Index i = 0; i < 600; ++i) g[i] = linear_evaluate(truth, design.evaluation.row(i).transpose());
  const ValidationSplit split = split_half(design, g);
  EXPECT_EQ(split.train.evaluation.rows(), 300);
  EXPECT_EQ(split.test_points.rows(), 300);
  const RankOneSelection sel = select_rank_one(design, g, cfg, {0.25, 4.0, 64.0}, {1e-10});
  EXPECT_EQ(sel.tau, 4.0);
  EXPECT_LT(sel.validation_error, 1e-10);
  EXPECT_THROW(select_rank_one(design, g, cfg, {}, {1e-6}), ArgumentError);
}

}  // namespace
}  // namespace psd
