#include "psd/cli/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "psd/errors.hpp"

namespace psd::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const char* section, std::set<std::string> allowed) {
  if (!j.is_object()) {
    throw ArgumentError(std::string("config: '") + section + "' must be an object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ArgumentError(std::string("config: unknown key '") + item.key() + "' in " +
                          section);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ArgumentError(std::string("config: bad value for '") + key + "'");
  }
}

void read_positive(const json& j, const char* key, double& out) {
  read(j, key, out);
  if (!(out > 0.0) || !std::isfinite(out)) {
    throw ArgumentError(std::string("config: '") + key + "' must be finite and > 0");
  }
}

std::vector<double> read_bounds(const json& j, const char* key, double infinity) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw ArgumentError(std::string("config: domain needs an array '") + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (v.is_null()) {
      out.push_back(infinity);
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ArgumentError("config: domain bounds must be numbers or null");
    }
  }
  return out;
}

json bounds_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(std::isinf(x) ? json(nullptr) : json(x));
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "config",
             {"format_version", "seed", "density", "domain", "fit", "sampler",
              "evaluate", "benchmark", "paths"});
  if (j.contains("format_version") && j.at("format_version") != kConfigFormatVersion) {
    throw ArgumentError("config: unsupported format_version");
  }
  ExperimentConfig c;
  read(j, "seed", c.seed);
  if (j.contains("density")) {
    if (!j.at("density").is_object()) throw ArgumentError("config: density must be an object");
    c.density = j.at("density");
  }
  if (j.contains("domain")) {
    const json& d = j.at("domain");
    check_keys(d, "domain", {"lower", "upper"});
    DomainSpec spec{read_bounds(d, "lower", -std::numeric_limits<double>::infinity()),
                    read_bounds(d, "upper", std::numeric_limits<double>::infinity())};
    if (spec.lower.size() != spec.upper.size() || spec.lower.empty()) {
      throw ArgumentError("config: domain lower/upper must have equal nonzero length");
    }
    c.domain = spec;
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    check_keys(f, "fit", {"mode", "n", "m", "tau", "lambda", "max_iters"});
    read(f, "mode", c.fit.mode);
    read(f, "n", c.fit.n);
    read(f, "m", c.fit.m);
    read_positive(f, "tau", c.fit.tau);
    read_positive(f, "lambda", c.fit.lambda);
    read(f, "max_iters", c.fit.max_iters);
  }
  if (c.fit.mode != "rank_one" && c.fit.mode != "psd") {
    throw ArgumentError("config: fit.mode must be 'rank_one' or 'psd'");
  }
  if (c.fit.m < 1 || c.fit.max_iters < 0) throw ArgumentError("config: bad fit sizes");
  if (j.contains("sampler")) {
    const json& s = j.at("sampler");
    check_keys(s, "sampler", {"n", "rho", "eps", "metric", "find_support", "support_eps",
                              "format", "full_integrals"});
    read(s, "n", c.sampler.n);
    read_positive(s, "rho", c.sampler.rho);
    if (s.contains("eps") && !s.at("eps").is_null()) {
      double eps = 0.0;
      read_positive(s, "eps", eps);
      c.sampler.eps = eps;
    }
    read(s, "metric", c.sampler.metric);
    read(s, "find_support", c.sampler.find_support);
    read_positive(s, "support_eps", c.sampler.support_eps);
    read(s, "format", c.sampler.format);
    read(s, "full_integrals", c.sampler.full_integrals);
  }
  if (c.sampler.metric != "tv" && c.sampler.metric != "hellinger") {
    throw ArgumentError("config: sampler.metric must be 'tv' or 'hellinger'");
  }
  if (c.sampler.format != "csv" && c.sampler.format != "binary") {
    throw ArgumentError("config: sampler.format must be 'csv' or 'binary'");
  }
  if (j.contains("evaluate")) {
    const json& e = j.at("evaluate");
    check_keys(e, "evaluate", {"samples", "rho", "mmd_eta", "repetitions"});
    read(e, "samples", c.evaluate.samples);
    if (e.contains("rho") && !e.at("rho").is_null()) {
      double rho = 0.0;
      read_positive(e, "rho", rho);
      c.evaluate.rho = rho;
    }
    read_positive(e, "mmd_eta", c.evaluate.mmd_eta);
    read(e, "repetitions", c.evaluate.repetitions);
  }
  if (c.evaluate.repetitions < 1) throw ArgumentError("config: repetitions must be >= 1");
  if (j.contains("benchmark")) {
    const json& b = j.at("benchmark");
    check_keys(b, "benchmark", {"budgets", "methods", "draws", "repetitions", "mmd_eta",
                                "truth_rho", "psd_rho", "m", "taus", "lambdas"});
    read(b, "budgets", c.benchmark.budgets);
    read(b, "methods", c.benchmark.methods);
    read(b, "draws", c.benchmark.draws);
    read(b, "repetitions", c.benchmark.repetitions);
    read_positive(b, "mmd_eta", c.benchmark.mmd_eta);
    read_positive(b, "truth_rho", c.benchmark.truth_rho);
    read_positive(b, "psd_rho", c.benchmark.psd_rho);
    read(b, "m", c.benchmark.m);
    read(b, "taus", c.benchmark.taus);
    read(b, "lambdas", c.benchmark.lambdas);
  }
  for (const auto& m : c.benchmark.methods) {
    if (m != "grid" && m != "psd" && m != "truth") {
      throw ArgumentError("config: unknown benchmark method '" + m + "'");
    }
  }
  if (c.benchmark.repetitions < 1 || c.benchmark.m < 1 || c.benchmark.draws < 1 ||
      c.benchmark.taus.empty() || c.benchmark.lambdas.empty()) {
    throw ArgumentError("config: bad benchmark settings");
  }
  if (j.contains("paths")) {
    const json& p = j.at("paths");
    check_keys(p, "paths", {"model", "samples"});
    read(p, "model", c.model_path);
    read(p, "samples", c.samples_path);
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["format_version"] = kConfigFormatVersion;
  j["seed"] = c.seed;
  j["density"] = c.density;
  if (c.domain) {
    j["domain"] = {{"lower", bounds_json(c.domain->lower)},
                   {"upper", bounds_json(c.domain->upper)}};
  }
  j["fit"] = {{"mode", c.fit.mode},     {"n", c.fit.n},
              {"m", c.fit.m},           {"tau", c.fit.tau},
              {"lambda", c.fit.lambda}, {"max_iters", c.fit.max_iters}};
  j["sampler"] = {{"n", c.sampler.n},
                  {"rho", c.sampler.rho},
                  {"eps", c.sampler.eps ? json(*c.sampler.eps) : json(nullptr)},
                  {"metric", c.sampler.metric},
                  {"find_support", c.sampler.find_support},
                  {"support_eps", c.sampler.support_eps},
                  {"format", c.sampler.format},
                  {"full_integrals", c.sampler.full_integrals}};
  j["evaluate"] = {{"samples", c.evaluate.samples},
                   {"rho", c.evaluate.rho ? json(*c.evaluate.rho) : json(nullptr)},
                   {"mmd_eta", c.evaluate.mmd_eta},
                   {"repetitions", c.evaluate.repetitions}};
  j["benchmark"] = {{"budgets", c.benchmark.budgets},
                    {"methods", c.benchmark.methods},
                    {"draws", c.benchmark.draws},
                    {"repetitions", c.benchmark.repetitions},
                    {"mmd_eta", c.benchmark.mmd_eta},
                    {"truth_rho", c.benchmark.truth_rho},
                    {"psd_rho", c.benchmark.psd_rho},
                    {"m", c.benchmark.m},
                    {"taus", c.benchmark.taus},
                    {"lambdas", c.benchmark.lambdas}};
  j["paths"] = {{"model", c.model_path}, {"samples", c.samples_path}};
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ArgumentError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace psd::cli
