#pragma once

// Built-in target densities for the command-line pipelines.
//
//   p1           d = 1, max(0, 0.08 k_.7(x,-1) - 0.4 k_.6(x,1) + 0.4 k_.7(x,1))
//   p2           (k_.2(x, 1) - k_.2(x, -1))^2 on [-1,1]^d, d = 5 by default
//   gaussian     exp(-|x - mean|^2 / (2 scale^2))
//   double_well  exp(-(barrier (x_1^2 - 1)^2 + |x_{2:d}|^2 / 2))
//   zero         0
//
// Each density has an unnormalized f and a square-root oracle g with
// g^2 = f, plus a default domain.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psd/box.hpp"
#include "psd/model.hpp"

namespace psd::cli {

struct Density {
  std::string name;
  Index dim = 1;
  HyperRectangle domain;
  std::function<double(const Eigen::Ref<const Vector>&)> f;
  std::function<double(const Eigen::Ref<const Vector>&)> g;
  // Set when the density is itself a rank-one Gaussian PSD model.
  std::optional<RankOneModel> exact_model;
};

/// spec = {"name": ..., optional parameters}. Throws ArgumentError on an
/// unknown name or bad parameter.
Density make_density(const nlohmann::json& spec);

std::vector<std::string> density_names();

}  // namespace psd::cli
