#pragma once

// Subcommands of the `psd` tool. Each writes its files under opts.out and
// returns the JSON report it wrote.
//
// Seed streams (s = --seed, or the config seed):
//   fit        derive_seed(s, 1)
//   sample     derive_seed(s, 2)
//   benchmark  derive_seed(s, 3), then per budget and repetition

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psd/cli/experiment_config.hpp"

namespace psd::cli {

inline constexpr int kReportFormatVersion = 1;

struct CommandOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool psd = false;                   // fit: general PSD fit instead of rank one
  bool find_support = false;          // sample: grow a box for unbounded domains
};

nlohmann::json cmd_fit(const ExperimentConfig& cfg, const CommandOptions& opts);
nlohmann::json cmd_sample(const ExperimentConfig& cfg, const CommandOptions& opts);
nlohmann::json cmd_evaluate(const ExperimentConfig& cfg, const CommandOptions& opts);
nlohmann::json cmd_benchmark(const ExperimentConfig& cfg, const CommandOptions& opts);

struct BenchmarkRow {
  std::string method;
  std::uint64_t n = 0;
  double mmd_mean = 0.0;
  double mmd_sd = 0.0;
  std::vector<double> values;
};

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_sd(const std::vector<double>& v);

}  // namespace psd::cli
