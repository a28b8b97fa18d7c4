#pragma once

// Command implementations shared by the C API and the CLI. Each returns the
// JSON report the CLI prints.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grind/corpus.hpp"
#include "grind/evaluate.hpp"
#include "grind/model_file.hpp"
#include "json.hpp"

namespace grind {

/// Model menu entry, e.g. "ridge-tfidf".
struct ModelSpec {
  ModelKind kind = ModelKind::naive;
  FeatureSpace space = FeatureSpace::counts;
};

/// Accepts naive, ols-bow, ols-tfidf, ridge-tfidf and knn-tfidf.
ModelSpec parse_model_spec(std::string_view name);
std::string model_spec_name(const ModelSpec& spec);

/// "1" or "1,2" (any subset of {1, 2}).
std::set<int> parse_orders(std::string_view text);
/// Comma-separated numbers; throws UsageError on anything else.
std::vector<double> parse_grid(std::string_view text);

struct StatsOptions {
  StopwordSet stopwords = StopwordSet::english();
  std::size_t top_k = 50;
};

/// Cleaning report, score summary and top unigrams/bigrams. Throws DataError
/// "no valid reviews" when nothing survives cleaning.
nlohmann::json cmd_stats(std::span<const Review> raw, const StatsOptions& options);

struct TrainOptions {
  std::string model = "naive";
  std::set<int> orders{1};
  std::optional<double> C;
  std::optional<std::int64_t> k;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  StopwordSet stopwords = StopwordSet::english();
  bool timestamp = true;
  /// Number of test-set rows to include as an example prediction table.
  std::size_t examples = 0;
};

struct TrainOutcome {
  TrainedModel model;
  nlohmann::json report;
};

/// Cleans, splits, fits on the train side and evaluates on the test side.
TrainOutcome cmd_train(std::span<const Review> raw, const TrainOptions& options);

struct TuneOptions {
  std::string model = "ridge-tfidf";
  std::set<int> orders{1};
  /// Empty selects the default grid of the family.
  std::vector<double> grid;
  std::int64_t kf = 5;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  StopwordSet stopwords = StopwordSet::english();
  bool timestamp = true;
  /// Refit the winner on the whole training split and evaluate it.
  bool retrain = false;
};

struct TuneOutcome {
  nlohmann::json result;
  std::optional<TrainedModel> model;
};

TuneOutcome cmd_tune(std::span<const Review> raw, const TuneOptions& options);

nlohmann::json cv_result_to_json(const CvResult& result);

/// One prediction line: {id, pred, pred_rounded}. `clip` clamps to [0, 100]
/// before rounding.
nlohmann::json cmd_predict_one(const TrainedModel& model, std::string_view id,
                               std::string_view text, bool clip = false);

/// Throws UsageError("model has no coefficients") for naive and K-NN models.
nlohmann::json cmd_explain(const TrainedModel& model, std::size_t k, bool impact = false);

}  // namespace grind
