// psd fit|sample|evaluate|benchmark --config <json> [--seed u64] [--out dir]
//
// Exit codes: 0 success, 2 configuration or argument error, 3 numerical
// failure.

#include <iostream>

#include <CLI11.hpp>

#include "psd/cli/commands.hpp"
#include "psd/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling from Gaussian PSD models"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool psd_flag = false;
  bool find_support = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory");
  };
  CLI::App* fit = app.add_subcommand("fit", "fit a model to the configured density");
  add_common(fit);
  fit->add_flag("--psd", psd_flag, "general PSD fit from density values");
  CLI::App* smp = app.add_subcommand("sample", "draw samples from a fitted model");
  add_common(smp);
  smp->add_flag("--find-support", find_support, "grow a box for unbounded domains");
  CLI::App* ev = app.add_subcommand("evaluate", "distances between models or samples");
  add_common(ev);
  CLI::App* bench = app.add_subcommand("benchmark", "MMD comparison against baselines");
  add_common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  psd::cli::CommandOptions opts;
  opts.out = out;
  opts.psd = psd_flag;
  opts.find_support = find_support;
  for (CLI::App* sub : {fit, smp, ev, bench}) {
    if (sub->parsed() && sub->count("--seed") > 0) opts.seed = seed;
  }

  try {
    const psd::cli::ExperimentConfig cfg = psd::cli::load_config(config_path);
    nlohmann::json report;
    if (fit->parsed()) {
      report = psd::cli::cmd_fit(cfg, opts);
    } else if (smp->parsed()) {
      report = psd::cli::cmd_sample(cfg, opts);
    } else if (ev->parsed()) {
      report = psd::cli::cmd_evaluate(cfg, opts);
    } else {
      report = psd::cli::cmd_benchmark(cfg, opts);
    }
    std::cout << report.dump(2) << '\n';
    return 0;
  } catch (const psd::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const psd::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const psd::ContractViolation& e) {
    std::cerr << "oracle error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const psd::InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
