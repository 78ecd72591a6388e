#include "psd/model_io.hpp"

#include <fstream>

#include "psd/errors.hpp"

namespace psd {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw ArgumentError(std::string(what) + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) {
    throw ArgumentError(std::string(what) + ": rows must be non-empty arrays");
  }
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw ArgumentError(std::string(what) + ": ragged matrix");
    }
    for (Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) {
        throw ArgumentError(std::string(what) + ": non-numeric entry");
      }
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) {
    throw ArgumentError(std::string(what) + ": expected a non-empty array");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ArgumentError(std::string(what) + ": non-numeric entry");
    }
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

nlohmann::json model_to_json(const GaussianPsdModel& model) {
  return {{"format_version", kModelFormatVersion},
          {"A", matrix_to_json(model.coefficients())},
          {"X", matrix_to_json(model.centers().values())},
          {"eta", vector_to_json(model.precision().values())}};
}

nlohmann::json model_to_json(const RankOneModel& model) {
  nlohmann::json j = model_to_json(model.to_psd());
  j["rank_one_a"] = vector_to_json(model.weights());
  return j;
}

nlohmann::json model_to_json(const StoredModel& model) {
  return model.rank_one ? model_to_json(*model.rank_one)
                        : model_to_json(model.psd);
}

StoredModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ArgumentError("model: expected a JSON object");
  if (j.contains("format_version") &&
      j.at("format_version") != kModelFormatVersion) {
    throw ArgumentError("model: unsupported format_version");
  }
  for (const char* key : {"A", "X", "eta"}) {
    if (!j.contains(key)) {
      throw ArgumentError(std::string("model: missing field '") + key + "'");
    }
  }
  CenterMatrix x(matrix_from_json(j.at("X"), "X"));
  PrecisionVector eta(vector_from_json(j.at("eta"), "eta"));
  if (j.contains("rank_one_a") && !j.at("rank_one_a").is_null()) {
    return StoredModel(RankOneModel(vector_from_json(j.at("rank_one_a"), "rank_one_a"),
                                    std::move(x), std::move(eta)));
  }
  return StoredModel(GaussianPsdModel(matrix_from_json(j.at("A"), "A"),
                                      std::move(x), std::move(eta),
                                      PsdRepair::kReject));
}

void save_model(const StoredModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  out << model_to_json(model).dump(2) << '\n';
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace psd
