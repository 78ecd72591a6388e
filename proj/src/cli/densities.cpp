#include "psd/cli/densities.hpp"

#include <cmath>

#include "psd/errors.hpp"

namespace psd::cli {

namespace {

double param(const nlohmann::json& spec, const char* key, double fallback) {
  if (!spec.contains(key)) return fallback;
  if (!spec.at(key).is_number()) {
    throw ArgumentError(std::string("density parameter '") + key + "' must be a number");
  }
  return spec.at(key).get<double>();
}

Index dim_param(const nlohmann::json& spec, Index fallback) {
  if (!spec.contains("dim")) return fallback;
  if (!spec.at("dim").is_number_integer() || spec.at("dim").get<long long>() < 1) {
    throw ArgumentError("density parameter 'dim' must be a positive integer");
  }
  return static_cast<Index>(spec.at("dim").get<long long>());
}

double k1(double eta, double x, double y) { return std::exp(-eta * (x - y) * (x - y)); }

Density with_sqrt(std::string name, Index dim, HyperRectangle domain,
                  std::function<double(const Eigen::Ref<const Vector>&)> f) {
  Density out{std::move(name), dim, std::move(domain), f, nullptr, std::nullopt};
  out.g = [f](const Eigen::Ref<const Vector>& x) { return std::sqrt(f(x)); };
  return out;
}

Density from_potential(std::string name, Index dim, HyperRectangle domain,
                       std::function<double(const Eigen::Ref<const Vector>&)> v) {
  Density out{std::move(name), dim, std::move(domain), nullptr, nullptr, std::nullopt};
  out.f = [v](const Eigen::Ref<const Vector>& x) { return std::exp(-v(x)); };
  out.g = [v](const Eigen::Ref<const Vector>& x) { return std::exp(-0.5 * v(x)); };
  return out;
}

}  // namespace

std::vector<std::string> density_names() {
  return {"double_well", "gaussian", "p1", "p2", "zero"};
}

Density make_density(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("name") || !spec.at("name").is_string()) {
    throw ArgumentError("density spec needs a string 'name'");
  }
  const std::string name = spec.at("name").get<std::string>();

  if (name == "p1") {
    // Printed coefficients make the mixture negative near x = 1; clamp.
    auto f = [](const Eigen::Ref<const Vector>& x) {
      const double t = x[0];
      const double v = 0.08 * k1(0.7, t, -1.0) - 0.4 * k1(0.6, t, 1.0) +
                       0.4 * k1(0.7, t, 1.0);
      return v > 0.0 ? v : 0.0;
    };
    return with_sqrt(name, 1, HyperRectangle::cube(-5.0, 5.0, 1), f);
  }

  if (name == "p2") {
    const Index d = dim_param(spec, 5);
    const double eta = param(spec, "eta", 0.2);
    const double half = param(spec, "half_width", 1.0);
    Matrix centers(2, d);
    centers.row(0).setOnes();
    centers.row(1).setConstant(-1.0);
    Vector a(2);
    a << 1.0, -1.0;
    RankOneModel model(a, CenterMatrix(centers), PrecisionVector::isotropic(eta, d));
    Density out{name, d, HyperRectangle::cube(-half, half, d), nullptr, nullptr, model};
    out.g = [model](const Eigen::Ref<const Vector>& x) { return linear_evaluate(model, x); };
    out.f = [model](const Eigen::Ref<const Vector>& x) { return evaluate(model, x); };
    return out;
  }

  if (name == "gaussian") {
    const Index d = dim_param(spec, 1);
    const double mean = param(spec, "mean", 0.0);
    const double scale = param(spec, "scale", 1.0);
    if (!(scale > 0.0)) throw ArgumentError("gaussian: scale must be > 0");
    auto v = [mean, scale](const Eigen::Ref<const Vector>& x) {
      return (x.array() - mean).square().sum() / (2.0 * scale * scale);
    };
    return from_potential(name, d, HyperRectangle::cube(mean - 6.0 * scale,
                                                        mean + 6.0 * scale, d),
                          v);
  }

  if (name == "double_well") {
    const Index d = dim_param(spec, 1);
    const double barrier = param(spec, "barrier", 2.0);
    if (!(barrier >= 0.0)) throw ArgumentError("double_well: barrier must be >= 0");
    auto v = [barrier](const Eigen::Ref<const Vector>& x) {
      const double w = x[0] * x[0] - 1.0;
      return barrier * w * w + 0.5 * x.tail(x.size() - 1).squaredNorm();
    };
    return from_potential(name, d, HyperRectangle::cube(-3.0, 3.0, d), v);
  }

  if (name == "zero") {
    const Index d = dim_param(spec, 1);
    auto zero = [](const Eigen::Ref<const Vector>&) { return 0.0; };
    return Density{name, d, HyperRectangle::cube(-1.0, 1.0, d), zero, zero, std::nullopt};
  }

  throw ArgumentError("unknown density '" + name + "'");
}

}  // namespace psd::cli
