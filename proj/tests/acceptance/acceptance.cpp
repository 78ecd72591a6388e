// Acceptance checks, one per criterion:
//
//   psd_acceptance --criterion N --tool <path to psd> --workdir <dir>
//
// Prints "criterion N: PASS|FAIL <details>" and exits nonzero on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psd/cli/commands.hpp"
#include "psd/cli/experiment_config.hpp"
#include "psd/estimator.hpp"
#include "psd/integration.hpp"
#include "psd/metrics.hpp"
#include "psd/model.hpp"
#include "psd/quadrature.hpp"
#include "psd/rng.hpp"
#include "psd/sampler.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace psd;
using psd::testing::random_box;
using psd::testing::random_model;
using psd::testing::random_points;
using psd::testing::random_rank_one;
using psd::testing::random_vector;
using psd::testing::uniform;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string tool;
  fs::path workdir;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Outcome integration_exactness(const Context&) {
  Xoshiro256 rng(101);
  double worst = 0.0;
  double closed_form_time = 0.0;
  const auto t0 = Clock::now();
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + t % 3;
    const Index m = 1 + static_cast<Index>(rng.below(10));
    const GaussianPsdModel model = random_model(rng, m, d, t % 2 == 0);
    const HyperRectangle q = random_box(rng, d, 0.3, 3.0);
    const auto t1 = Clock::now();
    const double exact = integrate(model, q);
    closed_form_time += seconds_since(t1);
    // Tolerance scaled to the size of the integrand on the box.
    const double scale = quadrature_box([&](const Vector& x) { return evaluate(model, x); },
                                        q, {1e-6, 10});
    const QuadratureOptions opts{std::max(1e-15, 1e-11 * std::fabs(scale)), 15};
    const double reference =
        quadrature_box([&](const Vector& x) { return evaluate(model, x); }, q, opts);
    worst = std::max(worst, std::fabs(exact - reference) / std::fabs(reference));
  }
  const double total = seconds_since(t0);
  return {worst <= 1e-8 && total < 10.0,
          "max rel err " + fmt(worst) + ", closed form " + fmt(closed_form_time) +
              " s, total with oracle " + fmt(total) + " s"};
}

Outcome complexity_bound(const Context&) {
  Xoshiro256 rng(202);
  int violations = 0;
  int erf_mismatch = 0;
  double max_ratio = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Index d = 1 + t % 3;
    const Index m = 1 + static_cast<Index>(rng.below(6));
    const GaussianPsdModel model = random_model(rng, m, d);
    const HyperRectangle q = random_box(rng, d, 0.2, 4.0);
    SamplerParams p;
    p.n = rng.below(300);
    p.rho = std::exp(uniform(rng, std::log(1e-3), std::log(1.0)));
    p.seed = rng();
    p.full_integrals = t % 4 == 0;
    const SampleRun run = sample(model, q, p);
    const double bound = integral_count_bound(q, p.n, p.rho);
    if (static_cast<double>(run.accounting.integral_evals) > bound || !run.bound_satisfied) {
      ++violations;
    }
    max_ratio = std::max(max_ratio, static_cast<double>(run.accounting.integral_evals) / bound);
    if (p.full_integrals) {
      const auto per = static_cast<std::uint64_t>(2 * d * m * m);
      if (run.accounting.erf_calls != per * run.accounting.integral_evals) ++erf_mismatch;
    }
  }
  // A single finite-box integral.
  Xoshiro256 rng2(7);
  const GaussianPsdModel model = random_model(rng2, 5, 3);
  IntegralAccounting acct;
  integrate(model, HyperRectangle::cube(-1, 1, 3), acct);
  if (acct.erf_calls != 2u * 3u * 25u || acct.integral_evals != 1u) ++erf_mismatch;
  return {violations == 0 && erf_mismatch == 0,
          std::to_string(violations) + " bound violations, " + std::to_string(erf_mismatch) +
              " erf accounting mismatches, max evals/bound " + fmt(max_ratio)};
}

Outcome sampler_distribution(const Context&) {
  const auto t0 = Clock::now();
  Xoshiro256 rng(303);
  const GaussianPsdModel model = random_model(rng, 5, 1, true, 0.5);
  Vector lo(1), hi(1);
  lo << -0.5;
  hi << 0.5;
  const HyperRectangle q(lo, hi);
  const double rho = std::ldexp(1.0, -6);
  const DyadicDensity dd = dyadic_density(model, q, rho);
  SamplerParams p;
  p.n = 100000;
  p.rho = rho;
  p.seed = 99;
  const SampleRun run = sample(model, q, p);
  std::vector<double> counts(dd.leaf_count(), 0.0);
  std::vector<double> xs(static_cast<std::size_t>(run.samples.rows()));
  for (Index i = 0; i < run.samples.rows(); ++i) {
    counts[dd.leaf_of(run.samples.row(i).transpose())] += 1.0;
    xs[static_cast<std::size_t>(i)] = run.samples(i, 0);
  }
  const auto chi = psd::testing::chi_square(counts, dd.masses(), static_cast<double>(p.n));
  const double ks = std::sqrt(static_cast<double>(p.n)) *
                    psd::testing::ks_statistic(xs, [&](double x) { return dd.cdf(x); });
  const double secs = seconds_since(t0);
  return {dd.leaf_count() == 64 && chi.p_value > 0.01 &&
              ks < psd::testing::kKsCritical1Percent && secs < 30.0,
          std::to_string(dd.leaf_count()) + " leaves, chi2 p=" + fmt(chi.p_value) +
              ", sqrt(N) KS=" + fmt(ks) + " (crit " + fmt(psd::testing::kKsCritical1Percent) +
              "), " + fmt(secs) + " s"};
}

Outcome distance_bounds(const Context&) {
  Xoshiro256 rng(404);
  int violations = 0;
  double worst_tv = 0.0, worst_h = 0.0, worst_w = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 2;
    const RankOneModel model = random_rank_one(rng, 1 + static_cast<Index>(rng.below(4)), d);
    const HyperRectangle q = HyperRectangle::cube(-1.5, 1.5, d);
    const double rho = d == 1 ? std::ldexp(1.0, -static_cast<int>(2 + rng.below(6)))
                              : std::ldexp(1.0, -static_cast<int>(1 + rng.below(3)));
    const DistanceReport r = exact_distances(model, q, rho);
    if (r.tv > *r.tv_bound || r.hellinger > *r.hellinger_bound) ++violations;
    worst_tv = std::max(worst_tv, r.tv / *r.tv_bound);
    worst_h = std::max(worst_h, r.hellinger / *r.hellinger_bound);
    if (d == 1) {
      if (*r.w1 > *r.w1_bound) ++violations;
      worst_w = std::max(worst_w, *r.w1 / *r.w1_bound);
    }
  }
  return {violations == 0, std::to_string(violations) + " violations; max value/bound tv " +
                               fmt(worst_tv) + ", hellinger " + fmt(worst_h) + ", w1 " +
                               fmt(worst_w)};
}

Outcome adaptive_rho_check(const Context&) {
  Xoshiro256 rng(505);
  const double eps = 0.05;
  int violations = 0;
  double worst_tv = 0.0, worst_h = 0.0;
  for (int t = 0; t < 6; ++t) {
    const RankOneModel model = random_rank_one(rng, 3, 1);
    const HyperRectangle q = HyperRectangle::cube(-2, 2, 1);
    for (DistanceMetric metric : {DistanceMetric::kTotalVariation, DistanceMetric::kHellinger}) {
      const double rho = adaptive_rho(model, q, eps, metric);
      SamplerParams p;
      p.n = 1000;
      p.rho = rho;
      p.seed = rng();
      const SampleRun run = sample(model.to_psd(), q, p);
      if (run.rho_used != rho || run.samples.rows() != 1000) ++violations;
      const DistanceReport r = exact_distances(model, q, rho);
      if (metric == DistanceMetric::kTotalVariation) {
        worst_tv = std::max(worst_tv, r.tv);
        if (r.tv > eps) ++violations;
      } else {
        worst_h = std::max(worst_h, r.hellinger);
        if (r.hellinger > eps) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations; max tv " + fmt(worst_tv) +
                               ", max hellinger " + fmt(worst_h) + " (eps 0.05)"};
}

Outcome rank_one_in_span(const Context&) {
  Xoshiro256 rng(606);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const Index d = 1 + t % 3;
    FitConfig cfg;
    cfg.n = 2000;
    cfg.m = 20;
    cfg.tau = 1.0;
    cfg.lambda = 1e-12;
    cfg.seed = rng();
    const HyperRectangle q = HyperRectangle::cube(-1, 1, d);
    const DesignPoints design = draw_design(q, cfg);
    const RankOneModel truth(random_vector(rng, cfg.m, -1, 1), CenterMatrix(design.centers),
                             PrecisionVector::isotropic(cfg.tau, d));
    Vector values(design.evaluation.rows());
    for (Index i = 0; i < values.size(); ++i) {
      values[i] = linear_evaluate(truth, design.evaluation.row(i).transpose());
    }
    const RankOneFit fit = fit_rank_one(design, values, cfg);
    const Matrix fresh = random_points(rng, 5000, d, -1, 1);
    double ss = 0.0;
    for (Index i = 0; i < fresh.rows(); ++i) {
      const Vector x = fresh.row(i).transpose();
      const double e = linear_evaluate(fit.model, x) - linear_evaluate(truth, x);
      ss += e * e;
    }
    worst = std::max(worst, std::sqrt(ss / static_cast<double>(fresh.rows())));
  }
  return {worst <= 1e-6, "max fresh-point RMSE " + fmt(worst)};
}

Outcome psd_fit_recovery(const Context&) {
  Xoshiro256 rng(707);
  const Index d = 1;
  FitConfig cfg;
  cfg.n = 20000;
  cfg.m = 6;
  cfg.tau = 2.0;
  cfg.lambda = 1e-10;
  cfg.seed = 11;
  const HyperRectangle q = HyperRectangle::cube(-1, 1, d);
  const DesignPoints design = draw_design(q, cfg);
  const GaussianPsdModel planted(psd::testing::random_psd(rng, cfg.m, 2),
                                 CenterMatrix(design.centers),
                                 PrecisionVector::isotropic(cfg.tau, d));
  Vector values(design.evaluation.rows());
  for (Index i = 0; i < values.size(); ++i) {
    values[i] = evaluate(planted, design.evaluation.row(i).transpose());
  }
  PsdFitOptions opts;
  opts.max_iters = 2000;
  opts.tolerance = 1e-10;
  const PsdFit fit = fit_psd(design, values, q, cfg, opts);
  bool monotone = true;
  for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
    const double prev = fit.objective_trace[i - 1];
    if (fit.objective_trace[i] > prev + 1e-14 * std::fabs(prev)) monotone = false;
  }
  // The data term is an unnormalized sum, so the minimizer tracks
  // (n / |Q|) f_p. The criterion is checked on the raw fit; the rescaled
  // error is reported alongside.
  const double scale = q.volume() / static_cast<double>(cfg.n);
  double ss = 0.0, ss_scaled = 0.0;
  const int grid = 1001;
  for (int i = 0; i < grid; ++i) {
    Vector x(1);
    x << -1.0 + 2.0 * i / (grid - 1);
    const double e = evaluate(fit.model, x) - evaluate(planted, x);
    const double es = scale * evaluate(fit.model, x) - evaluate(planted, x);
    ss += e * e;
    ss_scaled += es * es;
  }
  const double rmse = std::sqrt(ss / grid);
  const double rmse_scaled = std::sqrt(ss_scaled / grid);
  return {monotone && rmse <= 1e-4,
          std::string("objective ") + (monotone ? "monotone" : "NOT monotone") + " over " +
              std::to_string(fit.objective_trace.size()) + " iterates, grid RMSE " + fmt(rmse) +
              " (target 1e-4), after |Q|/n rescaling " + fmt(rmse_scaled)};
}

Outcome tail_bound_check(const Context&) {
  Xoshiro256 rng(808);
  int violations = 0;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Index d = 1 + t % 2;
    const GaussianPsdModel model = random_model(rng, 1 + static_cast<Index>(rng.below(5)), d);
    const Vector delta = random_vector(rng, d, 0.1, 2.0);
    const TailBox tb = tail_box(model, delta);
    const QuadratureOptions opts{1e-12, 12};
    auto f = [&](const Vector& x) { return evaluate(model, x); };
    // Whole-space mass in closed form, box mass by quadrature.
    const double outside = integrate(model, HyperRectangle::whole_space(d)) -
                           quadrature_box(f, tb.box, opts);
    if (tb.bound < outside) ++violations;
    if (tb.bound > 0.0) worst = std::max(worst, outside / tb.bound);
  }
  return {violations == 0,
          std::to_string(violations) + " violations; max outside/bound " + fmt(worst)};
}

Outcome benchmark_reproduction(const Context& ctx) {
  const auto t0 = Clock::now();
  cli::ExperimentConfig cfg;
  cfg.seed = 2024;
  cfg.density = {{"name", "p2"}, {"dim", 5}};
  cli::CommandOptions opts;
  opts.out = ctx.workdir / "benchmark";
  const nlohmann::json report = cli::cmd_benchmark(cfg, opts);
  const double secs = seconds_since(t0);
  struct Stat {
    double mean = 0.0;
    double sd = 0.0;
  };
  std::map<std::pair<std::string, std::uint64_t>, Stat> stats;
  for (const auto& row : report["rows"]) {
    stats[{row["method"].get<std::string>(), row["n"].get<std::uint64_t>()}] = {
        row["mmd_mean"].get<double>(), row["mmd_sd"].get<double>()};
  }
  bool ok = secs < 600.0;
  std::ostringstream detail;
  for (std::uint64_t n : cfg.benchmark.budgets) {
    const Stat psd = stats[{"psd", n}];
    const Stat grid = stats[{"grid", n}];
    const Stat truth = stats[{"truth", n}];
    const bool order = psd.mean <= grid.mean;
    const bool close = std::fabs(psd.mean - truth.mean) <= 2.0 * truth.sd;
    ok = ok && order && close;
    detail << "n=" << n << ": psd " << fmt(psd.mean) << " grid " << fmt(grid.mean) << " truth "
           << fmt(truth.mean) << "+-" << fmt(truth.sd) << (order ? "" : " [order]")
           << (close ? "" : " [not within 2 sd]") << "; ";
  }
  detail << fmt(secs) << " s";
  return {ok, detail.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const Context& ctx) {
  if (ctx.tool.empty()) return {false, "no --tool given"};
  const fs::path root = ctx.workdir / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  cli::ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.density = {{"name", "p2"}, {"dim", 2}};
  cfg.fit.n = 2000;
  cfg.fit.m = 20;
  cfg.sampler.n = 2000;
  cfg.sampler.rho = 1e-3;
  cfg.evaluate.rho = 0.25;
  cfg.benchmark.budgets = {200};
  cfg.benchmark.draws = 500;
  cfg.benchmark.repetitions = 2;
  cfg.benchmark.truth_rho = 1e-3;
  cfg.benchmark.taus = {0.2, 0.5};
  cfg.benchmark.lambdas = {1e-7};
  cfg.benchmark.m = 20;
  const fs::path model_cfg = root / "model.json.cfg";
  std::ofstream(model_cfg) << cli::config_to_json(cfg).dump(2);
  cli::ExperimentConfig mmd_cfg = cfg;
  mmd_cfg.evaluate.samples = {"samples.csv", "samples.csv"};
  const fs::path mmd_path = root / "mmd.json.cfg";
  std::ofstream(mmd_path) << cli::config_to_json(mmd_cfg).dump(2);

  const std::vector<std::pair<std::string, fs::path>> steps = {
      {"fit", model_cfg},      {"fit --psd", model_cfg}, {"fit", model_cfg},
      {"sample", model_cfg},   {"evaluate", model_cfg},  {"evaluate", mmd_path},
      {"benchmark", model_cfg}};
  std::vector<std::string> mismatched;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = root / ("run" + std::to_string(rep));
      const std::string cmd = ctx.tool + " " + steps[s].first + " --config " +
                              steps[s].second.string() + " --seed 77 --out " + out.string() +
                              " > " + (out / ("stdout_" + std::to_string(s))).string() +
                              " 2>&1";
      fs::create_directories(out);
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + cmd};
      std::vector<std::pair<std::string, std::string>> files;
      for (const auto& e : fs::directory_iterator(out)) {
        files.emplace_back(e.path().filename().string(), slurp(e.path()));
      }
      std::sort(files.begin(), files.end());
      runs.push_back(files);
    }
    if (runs[0] != runs[1]) mismatched.push_back(steps[s].first);
  }
  std::string detail = std::to_string(steps.size()) + " command runs compared";
  for (const auto& m : mismatched) detail += "; differs: " + m;
  return {mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  Context ctx;
  std::string workdir = "acceptance_work";
  app.add_option("--criterion", criterion)->required()->check(CLI::Range(1, 10));
  app.add_option("--tool", ctx.tool);
  app.add_option("--workdir", workdir);
  CLI11_PARSE(app, argc, argv);
  ctx.workdir = workdir;
  fs::create_directories(ctx.workdir);

  const std::vector<std::function<Outcome(const Context&)>> checks = {
      integration_exactness, complexity_bound,  sampler_distribution, distance_bounds,
      adaptive_rho_check,    rank_one_in_span,  psd_fit_recovery,     tail_bound_check,
      benchmark_reproduction, cli_determinism};
  Outcome out;
  try {
    out = checks[static_cast<std::size_t>(criterion - 1)](ctx);
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  std::cout << "criterion " << criterion << ": " << (out.pass ? "PASS" : "FAIL") << " "
            << out.detail << std::endl;
  return out.pass ? 0 : 1;
}
