#include "grind/model_file.hpp"

#include <fstream>
#include <sstream>

#include "grind/error.hpp"

namespace grind {

using nlohmann::json;

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::naive: return "naive";
    case ModelKind::ols: return "ols";
    case ModelKind::ridge: return "ridge";
    case ModelKind::knn: return "knn";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "naive") return ModelKind::naive;
  if (name == "ols") return ModelKind::ols;
  if (name == "ridge") return ModelKind::ridge;
  if (name == "knn") return ModelKind::knn;
  throw DataError("unknown model kind '" + std::string(name) + "'");
}

double TrainedModel::predict(std::string_view text) const {
  if (const auto* naive = std::get_if<NaiveModel>(&params)) return naive->mean_score;
  const auto features = recipe.featurize(text);
  if (const auto* knn = std::get_if<KnnModel>(&params)) return predict_knn(*knn, features);
  return predict_linear(std::get<LinearFit>(params), features);
}

bool TrainedModel::has_coefficients() const noexcept {
  return std::holds_alternative<LinearFit>(params);
}

LinearModel TrainedModel::linear() const {
  if (!has_coefficients()) throw UsageError("model has no coefficients");
  return {std::get<LinearFit>(params), recipe};
}

json to_json(const TrainedModel& model) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = to_string(model.kind);

  const auto& r = model.recipe;
  doc["recipe"] = {
      {"feature_space", to_string(r.space)},
      {"orders", std::vector<int>(r.orders.begin(), r.orders.end())},
      {"tokenizer", "lowercase; split on non-letters; drop stopwords"},
      {"log_base", "e"},
      {"standardized", false},
      {"stopwords_fnv1a64", r.stopwords.fingerprint()},
      {"stopwords", r.stopwords.words()},
  };

  if (model.kind != ModelKind::naive) {
    doc["vocabulary"] = {
        {"terms", r.vocabulary.terms()},
        {"doc_freq", r.vocabulary.doc_freq()},
        {"n_docs", r.vocabulary.n_docs()},
    };
    if (r.idf) doc["idf"] = r.idf->idf;
  }

  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, NaiveModel>) {
          doc["mean_score"] = p.mean_score;
        } else if constexpr (std::is_same_v<T, LinearFit>) {
          doc["intercept"] = p.intercept;
          doc["weights"] = p.weights;
          doc["column_means"] = p.column_means;
          doc["gradient_norm"] = p.gradient_norm;
        } else {
          std::vector<std::size_t> rows, cols;
          std::vector<double> vals;
          for (std::size_t i = 0; i < p.train.rows.size(); ++i) {
            for (const auto& e : p.train.rows[i].entries) {
              rows.push_back(i);
              cols.push_back(e.index);
              vals.push_back(e.value);
            }
          }
          doc["k"] = p.k;
          doc["train"] = {
              {"n_rows", p.train.rows.size()},
              {"dim", p.train.dim},
              {"row_ids", p.train.row_ids},
              {"row", rows},
              {"col", cols},
              {"val", vals},
          };
          doc["train_scores"] = p.scores;
        }
      },
      model.params);

  json training = {{"seed", model.info.seed}, {"n_train", model.info.n_train}};
  training["hyperparameters"] = json::object();
  for (const auto& [name, value] : model.info.hyperparameters) training["hyperparameters"][name] = value;
  if (model.info.timestamp) training["timestamp"] = *model.info.timestamp;
  doc["training"] = training;
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    throw DataError("corrupt model file: missing format_version");
  }
  if (!doc["format_version"].is_number_integer() || doc["format_version"].get<int>() != kModelFormatVersion) {
    throw DataError("unsupported model format_version " + doc["format_version"].dump() + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  try {
    TrainedModel model;
    model.kind = parse_model_kind(doc.at("kind").get<std::string>());

    const auto& r = doc.at("recipe");
    model.recipe.space = parse_feature_space(r.at("feature_space").get<std::string>());
    const auto orders = r.at("orders").get<std::vector<int>>();
    model.recipe.orders = std::set<int>(orders.begin(), orders.end());
    for (int o : model.recipe.orders) {
      if (o != 1 && o != 2) throw DataError("corrupt model file: n-gram order " + std::to_string(o));
    }
    model.recipe.stopwords = StopwordSet(r.at("stopwords").get<std::vector<std::string>>());
    if (r.contains("stopwords_fnv1a64") &&
        r["stopwords_fnv1a64"].get<std::string>() != model.recipe.stopwords.fingerprint()) {
      throw DataError("corrupt model file: stopword list does not match its fingerprint");
    }

    if (model.kind != ModelKind::naive) {
      const auto& v = doc.at("vocabulary");
      model.recipe.vocabulary = Vocabulary(v.at("terms").get<std::vector<std::string>>(),
                                           v.at("doc_freq").get<std::vector<std::size_t>>(),
                                           v.at("n_docs").get<std::size_t>());
      if (doc.contains("idf")) {
        model.recipe.idf = IdfModel{doc["idf"].get<std::vector<double>>()};
        if (model.recipe.idf->idf.size() != model.recipe.vocabulary.size()) {
          throw DataError("corrupt model file: idf length does not match the vocabulary");
        }
      }
      if (model.recipe.space == FeatureSpace::tfidf && !model.recipe.idf) {
        throw DataError("corrupt model file: TF-IDF recipe without idf values");
      }
    }

    switch (model.kind) {
      case ModelKind::naive:
        model.params = NaiveModel{doc.at("mean_score").get<double>()};
        break;
      case ModelKind::ols:
      case ModelKind::ridge: {
        LinearFit fit;
        fit.intercept = doc.at("intercept").get<double>();
        fit.weights = doc.at("weights").get<std::vector<double>>();
        if (doc.contains("column_means")) fit.column_means = doc["column_means"].get<std::vector<double>>();
        if (doc.contains("gradient_norm")) fit.gradient_norm = doc["gradient_norm"].get<double>();
        if (fit.weights.size() != model.recipe.vocabulary.size()) {
          throw DataError("corrupt model file: weight count does not match the vocabulary");
        }
        model.params = std::move(fit);
        break;
      }
      case ModelKind::knn: {
        const auto& t = doc.at("train");
        FeatureMatrix matrix;
        matrix.dim = t.at("dim").get<std::size_t>();
        const auto n_rows = t.at("n_rows").get<std::size_t>();
        const auto rows = t.at("row").get<std::vector<std::size_t>>();
        const auto cols = t.at("col").get<std::vector<std::size_t>>();
        const auto vals = t.at("val").get<std::vector<double>>();
        auto ids = t.at("row_ids").get<std::vector<std::string>>();
        if (rows.size() != cols.size() || rows.size() != vals.size() || ids.size() != n_rows ||
            matrix.dim != model.recipe.vocabulary.size()) {
          throw DataError("corrupt model file: inconsistent K-NN training matrix");
        }
        matrix.rows.assign(n_rows, SparseVector{matrix.dim, {}});
        for (std::size_t e = 0; e < rows.size(); ++e) {
          if (rows[e] >= n_rows || cols[e] >= matrix.dim) {
            throw DataError("corrupt model file: K-NN entry out of range");
          }
          auto& entries = matrix.rows[rows[e]].entries;
          if (!entries.empty() && entries.back().index >= cols[e]) {
            throw DataError("corrupt model file: K-NN entries are not sorted");
          }
          entries.push_back({cols[e], vals[e]});
        }
        matrix.row_ids = std::move(ids);
        model.params = fit_knn(std::move(matrix), doc.at("train_scores").get<std::vector<double>>(),
                               doc.at("k").get<std::int64_t>());
        break;
      }
    }

    const auto& training = doc.at("training");
    model.info.seed = training.at("seed").get<std::uint64_t>();
    model.info.n_train = training.at("n_train").get<std::size_t>();
    if (training.contains("timestamp")) model.info.timestamp = training["timestamp"].get<std::string>();
    if (training.contains("hyperparameters")) {
      for (const auto& [name, value] : training["hyperparameters"].items()) {
        model.info.hyperparameters[name] = value.get<double>();
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << to_json(model).dump(1) << '\n';
  if (!out) throw DataError("error while writing model file '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("corrupt model file '" + path + "': " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace grind
