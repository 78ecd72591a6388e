#pragma once

// JSON form of a model:
//   {"format_version": 1, "A": [[...], ...], "X": [[...], ...],
//    "eta": [...], "rank_one_a": [...]}      // rank_one_a optional
// Doubles are written in shortest round-trip form.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "psd/model.hpp"

namespace psd {

inline constexpr int kModelFormatVersion = 1;

/// A model as stored on disk. `rank_one` is set when the file carries the
/// linear-model weights; `psd` is then a a^T.
struct StoredModel {
  GaussianPsdModel psd;
  std::optional<RankOneModel> rank_one;

  explicit StoredModel(GaussianPsdModel m) : psd(std::move(m)) {}
  explicit StoredModel(RankOneModel r) : psd(r.to_psd()), rank_one(std::move(r)) {}
};

nlohmann::json model_to_json(const GaussianPsdModel& model);
nlohmann::json model_to_json(const RankOneModel& model);
nlohmann::json model_to_json(const StoredModel& model);

StoredModel model_from_json(const nlohmann::json& j);

void save_model(const StoredModel& model, const std::filesystem::path& path);
StoredModel load_model(const std::filesystem::path& path);

/// Helpers shared with the report writers.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const char* what);
Vector vector_from_json(const nlohmann::json& j, const char* what);

}  // namespace psd
