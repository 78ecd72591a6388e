#include "psd/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "psd/baseline_grid.hpp"
#include "psd/cli/densities.hpp"
#include "psd/errors.hpp"
#include "psd/estimator.hpp"
#include "psd/metrics.hpp"
#include "psd/model_io.hpp"
#include "psd/rng.hpp"
#include "psd/sampler.hpp"
#include "psd/samples_io.hpp"

namespace psd::cli {

using nlohmann::json;

namespace {

std::uint64_t seed_of(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return opts.seed.value_or(cfg.seed);
}

std::filesystem::path resolve(const CommandOptions& opts, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : opts.out / path;
}

void prepare_out(const CommandOptions& opts) {
  std::error_code ec;
  std::filesystem::create_directories(opts.out, ec);
  if (ec) throw ArgumentError("cannot create output directory " + opts.out.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

HyperRectangle domain_of(const ExperimentConfig& cfg, const Density& density) {
  if (!cfg.domain) return density.domain;
  Vector lo = Eigen::Map<const Vector>(cfg.domain->lower.data(),
                                       static_cast<Index>(cfg.domain->lower.size()));
  Vector hi = Eigen::Map<const Vector>(cfg.domain->upper.data(),
                                       static_cast<Index>(cfg.domain->upper.size()));
  if (lo.size() != density.dim) {
    throw ArgumentError("config: domain dimension does not match the density");
  }
  return HyperRectangle(lo, hi);
}

HyperRectangle domain_of(const ExperimentConfig& cfg, Index dim) {
  if (!cfg.domain) {
    json spec = cfg.density;
    const Density d = make_density(spec);
    if (d.dim != dim) throw ArgumentError("config: density and model dimensions differ");
    return d.domain;
  }
  Density stub{"", dim, HyperRectangle::cube(0.0, 1.0, dim), nullptr, nullptr, std::nullopt};
  return domain_of(cfg, stub);
}

json box_json(const HyperRectangle& q) {
  json lo = json::array();
  json hi = json::array();
  for (Index k = 0; k < q.dim(); ++k) {
    lo.push_back(std::isinf(q.lower(k)) ? json(nullptr) : json(q.lower(k)));
    hi.push_back(std::isinf(q.upper(k)) ? json(nullptr) : json(q.upper(k)));
  }
  return {{"lower", lo}, {"upper", hi}};
}

json header(const char* command, std::uint64_t seed) {
  return {{"format_version", kReportFormatVersion}, {"command", command}, {"seed", seed}};
}

DistanceMetric metric_of(const std::string& s) {
  return s == "hellinger" ? DistanceMetric::kHellinger : DistanceMetric::kTotalVariation;
}

json distance_entry(double value, const std::optional<double>& bound) {
  json j = {{"value", value}};
  if (bound) {
    j["bound"] = *bound;
    j["slack"] = *bound - value;
  } else {
    j["bound"] = nullptr;
    j["slack"] = nullptr;
  }
  return j;
}

}  // namespace

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

json cmd_fit(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const std::uint64_t seed = seed_of(cfg, opts);
  const Density density = make_density(cfg.density);
  const HyperRectangle domain = domain_of(cfg, density);
  if (!domain.is_bounded()) throw ArgumentError("fit: the domain must be bounded");
  FitConfig fc;
  fc.n = cfg.fit.n;
  fc.m = static_cast<Index>(cfg.fit.m);
  fc.tau = cfg.fit.tau;
  fc.lambda = cfg.fit.lambda;
  fc.seed = derive_seed(seed, 1);
  fc.validate();
  prepare_out(opts);

  json report = header("fit", seed);
  report["density"] = cfg.density;
  report["domain"] = box_json(domain);
  report["n"] = fc.n;
  report["m"] = fc.m;
  report["tau"] = fc.tau;
  report["lambda"] = fc.lambda;

  const bool general = opts.psd || cfg.fit.mode == "psd";
  if (general) {
    const EvaluationOracle oracle(density.f, domain, OracleMode::kDensity);
    PsdFitOptions po;
    po.max_iters = cfg.fit.max_iters;
    const PsdFit fit = fit_psd(oracle, fc, po);
    save_model(StoredModel(fit.model), resolve(opts, cfg.model_path));
    report["mode"] = "psd";
    report["iterations"] = fit.iterations;
    report["converged"] = fit.converged;
    report["objective"] = fit.objective_trace.back();
    report["gradient_mapping_norm"] = fit.gradient_mapping_norm;
    report["warning"] = fit.warning ? json(*fit.warning) : json(nullptr);
  } else {
    const EvaluationOracle oracle(density.g, domain, OracleMode::kSquareRoot);
    const RankOneFit fit = fit_rank_one(oracle, fc);
    save_model(StoredModel(fit.model), resolve(opts, cfg.model_path));
    report["mode"] = "rank_one";
    report["residual_norm"] = fit.residual_norm;
    report["rhs_norm"] = fit.rhs_norm;
    report["jitter"] = fit.jitter;
  }
  report["model"] = cfg.model_path;
  write_json(opts.out / "fit_report.json", report);
  return report;
}

json cmd_sample(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const std::uint64_t seed = seed_of(cfg, opts);
  const StoredModel model = load_model(resolve(opts, cfg.model_path));
  const Index d = model.psd.dim();
  HyperRectangle domain = domain_of(cfg, d);
  const bool grow = opts.find_support || cfg.sampler.find_support;
  if (!domain.is_bounded()) {
    if (!grow) {
      throw ArgumentError("sample: the domain is unbounded; pass --find-support");
    }
    domain = find_support(model.psd, cfg.sampler.support_eps);
  }

  double rho = cfg.sampler.rho;
  if (cfg.sampler.eps) {
    const DistanceMetric metric = metric_of(cfg.sampler.metric);
    rho = model.rank_one ? adaptive_rho(*model.rank_one, domain, *cfg.sampler.eps, metric)
                         : adaptive_rho(model.psd, domain, *cfg.sampler.eps, metric);
  }
  SamplerParams params;
  params.rho = rho;
  params.n = cfg.sampler.n;
  params.seed = derive_seed(seed, 2);
  params.full_integrals = cfg.sampler.full_integrals;
  prepare_out(opts);
  const SampleRun run = sample(model.psd, domain, params);
  const SampleFormat format =
      cfg.sampler.format == "binary" ? SampleFormat::kBinary : SampleFormat::kCsv;
  write_samples(resolve(opts, cfg.samples_path), run.samples, format);

  json report = header("sample", seed);
  report["samples"] = cfg.samples_path;
  report["sample_format"] = cfg.sampler.format;
  report["n"] = cfg.sampler.n;
  report["dim"] = d;
  report["domain"] = box_json(domain);
  report["rho_used"] = run.rho_used;
  report["eps"] = cfg.sampler.eps ? json(*cfg.sampler.eps) : json(nullptr);
  report["metric"] = cfg.sampler.metric;
  report["leaf_count"] = run.leaf_count;
  report["integral_evals"] = run.accounting.integral_evals;
  report["erf_calls"] = run.accounting.erf_calls;
  report["integral_bound"] = run.integral_bound;
  report["bound_satisfied"] = run.bound_satisfied;
  write_json(opts.out / "sample_report.json", report);
  return report;
}

json cmd_evaluate(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const std::uint64_t seed = seed_of(cfg, opts);
  json report = header("evaluate", seed);
  prepare_out(opts);

  if (!cfg.evaluate.samples.empty()) {
    if (cfg.evaluate.samples.size() != 2) {
      throw ArgumentError("evaluate: 'samples' must list exactly two files");
    }
    std::vector<Matrix> sets;
    for (const auto& s : cfg.evaluate.samples) {
      const auto path = resolve(opts, s);
      const bool binary = path.extension() == ".bin";
      Index dim = 0;
      if (binary) dim = make_density(cfg.density).dim;
      sets.push_back(read_samples(path, binary ? SampleFormat::kBinary : SampleFormat::kCsv,
                                  dim));
    }
    if (sets[0].cols() != sets[1].cols()) {
      throw ArgumentError("evaluate: sample files have different dimensions");
    }
    const auto reps = static_cast<Index>(cfg.evaluate.repetitions);
    const Index chunk = std::min(sets[0].rows(), sets[1].rows()) / reps;
    if (chunk < 1) throw ArgumentError("evaluate: too few samples for the repetitions");
    const PrecisionVector eta =
        PrecisionVector::isotropic(cfg.evaluate.mmd_eta, sets[0].cols());
    std::vector<double> values;
    for (Index r = 0; r < reps; ++r) {
      values.push_back(empirical_mmd(sets[0].middleRows(r * chunk, chunk),
                                     sets[1].middleRows(r * chunk, chunk), eta));
    }
    const auto [mean, sd] = mean_sd(values);
    report["mmd"] = {{"eta", cfg.evaluate.mmd_eta},
                     {"chunk_size", chunk},
                     {"values", values},
                     {"mean", mean},
                     {"sd", sd}};
  } else {
    const StoredModel model = load_model(resolve(opts, cfg.model_path));
    const HyperRectangle domain = domain_of(cfg, model.psd.dim());
    if (!domain.is_bounded()) throw ArgumentError("evaluate: the domain must be bounded");
    double rho = cfg.evaluate.rho.value_or(cfg.sampler.rho);
    if (!cfg.evaluate.rho && cfg.sampler.eps) {
      const DistanceMetric metric = metric_of(cfg.sampler.metric);
      rho = model.rank_one ? adaptive_rho(*model.rank_one, domain, *cfg.sampler.eps, metric)
                           : adaptive_rho(model.psd, domain, *cfg.sampler.eps, metric);
    }
    const DistanceReport dist = model.rank_one
                                    ? exact_distances(*model.rank_one, domain, rho)
                                    : exact_distances(model.psd, domain, rho);
    report["rho"] = rho;
    report["domain"] = box_json(domain);
    report["tv"] = distance_entry(dist.tv, dist.tv_bound);
    report["hellinger"] = distance_entry(dist.hellinger, dist.hellinger_bound);
    report["w1"] = dist.w1 ? distance_entry(*dist.w1, dist.w1_bound) : json(nullptr);
  }
  write_json(opts.out / "evaluate_report.json", report);
  return report;
}

json cmd_benchmark(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const std::uint64_t seed = seed_of(cfg, opts);
  const std::uint64_t base = derive_seed(seed, 3);
  const BenchmarkSection& b = cfg.benchmark;
  const Density density = make_density(cfg.density);
  const HyperRectangle domain = domain_of(cfg, density);
  if (!domain.is_bounded()) throw ArgumentError("benchmark: the domain must be bounded");
  if (!density.exact_model) {
    throw ArgumentError("benchmark: the density has no exact sampler for ground truth");
  }
  const GaussianPsdModel truth = density.exact_model->to_psd();
  const PrecisionVector mmd_eta = PrecisionVector::isotropic(b.mmd_eta, density.dim);
  const auto reps = static_cast<std::uint64_t>(b.repetitions);
  prepare_out(opts);

  auto draw = [&](const GaussianPsdModel& model, double rho, std::uint64_t s) {
    SamplerParams p;
    p.rho = rho;
    p.n = b.draws;
    p.seed = s;
    return sample(model, domain, p).samples;
  };

  // Reference draws shared by every method and budget.
  std::vector<Matrix> reference;
  for (std::uint64_t r = 0; r < reps; ++r) {
    reference.push_back(draw(truth, b.truth_rho, derive_seed(base, 1000 + r)));
  }

  std::vector<BenchmarkRow> rows;
  json selections = json::array();
  for (std::size_t i = 0; i < b.budgets.size(); ++i) {
    const std::uint64_t n = b.budgets[i];
    const std::uint64_t stream = derive_seed(base, 10 + i);
    for (const auto& method : b.methods) {
      BenchmarkRow row{method, n, 0.0, 0.0, {}};
      if (method == "truth") {
        for (std::uint64_t r = 0; r < reps; ++r) {
          const Matrix fresh = draw(truth, b.truth_rho, derive_seed(stream, 100 + r));
          row.values.push_back(empirical_mmd(fresh, reference[r], mmd_eta));
        }
      } else if (method == "grid") {
        const EvaluationOracle oracle(density.f, domain, OracleMode::kDensity);
        const GridSampler grid = build_grid(oracle, domain, n);
        for (std::uint64_t r = 0; r < reps; ++r) {
          const Matrix s = grid_sample(grid, b.draws, derive_seed(stream, 200 + r));
          row.values.push_back(empirical_mmd(s, reference[r], mmd_eta));
        }
      } else {
        FitConfig fc;
        fc.n = n;
        fc.m = static_cast<Index>(b.m);
        fc.seed = derive_seed(stream, 1);
        const EvaluationOracle oracle(density.g, domain, OracleMode::kSquareRoot);
        const DesignPoints design = draw_design(domain, fc);
        const Vector values = oracle.evaluate_rows(design.evaluation);
        const RankOneSelection sel = select_rank_one(design, values, fc, b.taus, b.lambdas);
        selections.push_back({{"n", n},
                              {"tau", sel.tau},
                              {"lambda", sel.lambda},
                              {"validation_error", sel.validation_error}});
        const GaussianPsdModel fitted = sel.fit.model.to_psd();
        for (std::uint64_t r = 0; r < reps; ++r) {
          const Matrix s = draw(fitted, b.psd_rho, derive_seed(stream, 300 + r));
          row.values.push_back(empirical_mmd(s, reference[r], mmd_eta));
        }
      }
      std::tie(row.mmd_mean, row.mmd_sd) = mean_sd(row.values);
      rows.push_back(std::move(row));
    }
  }
  std::sort(rows.begin(), rows.end(), [](const BenchmarkRow& x, const BenchmarkRow& y) {
    return std::tie(x.method, x.n) < std::tie(y.method, y.n);
  });

  std::ofstream csv(opts.out / "benchmark.csv", std::ios::binary);
  if (!csv) throw ArgumentError("cannot write benchmark.csv");
  csv << "method,n,mmd_mean,mmd_sd\n";
  json table = json::array();
  for (const auto& row : rows) {
    csv << row.method << ',' << row.n << ',' << format_double(row.mmd_mean) << ','
        << format_double(row.mmd_sd) << '\n';
    table.push_back({{"method", row.method},
                     {"n", row.n},
                     {"mmd_mean", row.mmd_mean},
                     {"mmd_sd", row.mmd_sd},
                     {"values", row.values}});
  }
  json report = header("benchmark", seed);
  report["density"] = cfg.density;
  report["domain"] = box_json(domain);
  report["draws"] = b.draws;
  report["repetitions"] = b.repetitions;
  report["mmd_eta"] = b.mmd_eta;
  report["truth_rho"] = b.truth_rho;
  report["psd_rho"] = b.psd_rho;
  report["selections"] = selections;
  report["rows"] = table;
  write_json(opts.out / "benchmark_report.json", report);
  return report;
}

}  // namespace psd::cli
