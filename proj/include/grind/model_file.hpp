#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "grind/regress.hpp"
#include "json.hpp"

namespace grind {

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { naive, ols, ridge, knn };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct TrainingInfo {
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::optional<std::string> timestamp;
  std::map<std::string, double> hyperparameters;
};

/// A self-contained trained model: the featurization recipe plus the fitted
/// parameters of one predictor family.
struct TrainedModel {
  ModelKind kind = ModelKind::naive;
  FeatureRecipe recipe;
  std::variant<NaiveModel, LinearFit, KnnModel> params;
  TrainingInfo info;

  double predict(std::string_view text) const;
  bool has_coefficients() const noexcept;
  /// Throws UsageError("model has no coefficients") for naive and K-NN.
  LinearModel linear() const;
};

/// Single JSON document; doubles are written in shortest round-trip form so
/// a reloaded model predicts bit-identically.
nlohmann::json to_json(const TrainedModel& model);
/// Throws DataError on an unknown format_version or a corrupt document.
TrainedModel model_from_json(const nlohmann::json& doc);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace grind
