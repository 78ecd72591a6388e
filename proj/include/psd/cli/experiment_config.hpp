#pragma once

// Configuration shared by every subcommand. JSON form (all keys optional):
//
// {
//   "format_version": 1,
//   "seed": 0,
//   "density": {"name": "p2", "dim": 5},
//   "domain": {"lower": [...], "upper": [...]},    // null entries = infinite
//   "fit": {"mode": "rank_one" | "psd", "n", "m", "tau", "lambda", "max_iters"},
//   "sampler": {"n", "rho", "eps", "metric": "tv" | "hellinger",
//               "find_support", "support_eps", "format": "csv" | "binary",
//               "full_integrals"},
//   "evaluate": {"samples": [a, b], "rho", "mmd_eta", "repetitions"},
//   "benchmark": {"budgets", "methods", "draws", "repetitions", "mmd_eta",
//                 "truth_rho", "psd_rho", "m", "taus", "lambdas"},
//   "paths": {"model", "samples"}
// }
//
// Relative paths are resolved against the --out directory.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace psd::cli {

inline constexpr int kConfigFormatVersion = 1;

struct FitSection {
  std::string mode = "rank_one";
  std::uint64_t n = 10000;
  std::int64_t m = 50;
  double tau = 1.0;
  double lambda = 1e-6;
  int max_iters = 500;
  bool operator==(const FitSection&) const = default;
};

struct SamplerSection {
  std::uint64_t n = 1000;
  double rho = 1e-3;
  std::optional<double> eps;
  std::string metric = "tv";
  bool find_support = false;
  double support_eps = 1e-6;
  std::string format = "csv";
  bool full_integrals = false;
  bool operator==(const SamplerSection&) const = default;
};

struct EvaluateSection {
  std::vector<std::string> samples;
  std::optional<double> rho;
  double mmd_eta = 2.0;
  int repetitions = 5;
  bool operator==(const EvaluateSection&) const = default;
};

struct BenchmarkSection {
  std::vector<std::uint64_t> budgets{1000, 10000};
  std::vector<std::string> methods{"grid", "psd", "truth"};
  std::uint64_t draws = 10000;
  int repetitions = 5;
  double mmd_eta = 2.0;
  double truth_rho = 1e-6;
  double psd_rho = 1e-3;
  std::int64_t m = 50;
  std::vector<double> taus{0.1, 0.2, 0.5, 1.0};
  std::vector<double> lambdas{1e-9, 1e-7, 1e-5};
  bool operator==(const BenchmarkSection&) const = default;
};

struct DomainSpec {
  std::vector<double> lower;  // +-inf allowed
  std::vector<double> upper;
  bool operator==(const DomainSpec&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  nlohmann::json density = {{"name", "p2"}};
  std::optional<DomainSpec> domain;
  FitSection fit;
  SamplerSection sampler;
  EvaluateSection evaluate;
  BenchmarkSection benchmark;
  std::string model_path = "model.json";
  std::string samples_path = "samples.csv";
  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ArgumentError on unknown keys, wrong types or bad values.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

}  // namespace psd::cli
