#include "grind/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "grind/error.hpp"
#include "grind/interpret.hpp"

namespace grind {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto end = text.find(',', start);
    auto part = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    parts.push_back(part);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<Review> clean_or_throw(std::span<const Review> raw, CorpusSummary* summary = nullptr) {
  auto [kept, s] = clean(raw);
  if (kept.empty()) throw DataError("no valid reviews");
  if (summary) *summary = s;
  return kept;
}

std::vector<std::size_t> positions(std::size_t n) {
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

template <typename Ids>
std::vector<Review> pick(std::span<const Review> reviews, const Ids& ids) {
  std::vector<Review> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(reviews[id]);
  return out;
}

json summary_to_json(const CorpusSummary& s) {
  return {{"count", s.count}, {"mean", s.mean},     {"min", s.min}, {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

json terms_to_json(const std::vector<std::pair<std::string, std::size_t>>& ranked) {
  json out = json::array();
  for (const auto& [term, count] : ranked) out.push_back({{"term", term}, {"count", count}});
  return out;
}

json ranking_side(const std::vector<WeightedTerm>& side) {
  json out = json::array();
  for (const auto& [term, weight] : side) out.push_back({{"term", term}, {"weight", weight}});
  return out;
}

json report_params(const ModelSpec& spec, const std::set<int>& orders, const TrainingInfo& info) {
  json params = {{"orders", std::vector<int>(orders.begin(), orders.end())},
                 {"feature_space", to_string(spec.space)}};
  for (const auto& [name, value] : info.hyperparameters) params[name] = value;
  return params;
}

// Fits one model family on already-cleaned training reviews.
TrainedModel fit_model(const ModelSpec& spec, std::span<const Review> train,
                       const std::set<int>& orders, const StopwordSet& stopwords,
                       std::optional<double> C, std::optional<std::int64_t> k) {
  TrainedModel model;
  model.kind = spec.kind;
  model.info.n_train = train.size();
  const auto y = scores_of(train);

  if (spec.kind == ModelKind::naive) {
    model.recipe.space = spec.space;
    model.recipe.orders = orders;
    model.recipe.stopwords = stopwords;
    model.params = fit_naive(y);
    return model;
  }

  const auto docs = tokenize_reviews(train, stopwords, orders);
  model.recipe = fit_recipe(docs, spec.space, orders, stopwords);
  auto z = transform(model.recipe, docs);
  switch (spec.kind) {
    case ModelKind::ols:
      model.params = fit_least_squares(z, y);
      break;
    case ModelKind::ridge:
      model.params = fit_ridge(z, y, *C);
      model.info.hyperparameters["C"] = *C;
      break;
    case ModelKind::knn:
      model.params = fit_knn(std::move(z), y, *k);
      model.info.hyperparameters["k"] = static_cast<double>(*k);
      break;
    case ModelKind::naive:
      break;
  }
  return model;
}

EvalReport evaluate_model(const TrainedModel& model, std::span<const Review> test) {
  const auto y = scores_of(test);
  std::vector<double> pred;
  pred.reserve(test.size());
  for (const auto& r : test) pred.push_back(model.predict(r.text));
  return evaluate(y, pred);
}

json eval_to_json(const EvalReport& report) {
  return {{"mse", report.mse}, {"mae", report.mae}, {"n", report.n}};
}

}  // namespace

ModelSpec parse_model_spec(std::string_view name) {
  if (name == "naive") return {ModelKind::naive, FeatureSpace::counts};
  if (name == "ols-bow") return {ModelKind::ols, FeatureSpace::counts};
  if (name == "ols-tfidf") return {ModelKind::ols, FeatureSpace::tfidf};
  if (name == "ridge-tfidf") return {ModelKind::ridge, FeatureSpace::tfidf};
  if (name == "knn-tfidf") return {ModelKind::knn, FeatureSpace::tfidf};
  throw UsageError("unknown model '" + std::string(name) +
                   "' (expected naive, ols-bow, ols-tfidf, ridge-tfidf or knn-tfidf)");
}

std::string model_spec_name(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::naive: return "naive";
    case ModelKind::ols: return spec.space == FeatureSpace::counts ? "ols-bow" : "ols-tfidf";
    case ModelKind::ridge: return "ridge-tfidf";
    case ModelKind::knn: return "knn-tfidf";
  }
  return "unknown";
}

std::set<int> parse_orders(std::string_view text) {
  std::set<int> orders;
  for (auto part : split_commas(text)) {
    if (part == "1") {
      orders.insert(1);
    } else if (part == "2") {
      orders.insert(2);
    } else {
      throw UsageError("invalid n-gram orders '" + std::string(text) + "' (use 1, 2 or 1,2)");
    }
  }
  return orders;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  for (auto part : split_commas(text)) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || !std::isfinite(value)) {
      throw UsageError("invalid grid '" + std::string(text) + "': '" + std::string(part) +
                       "' is not a number");
    }
    grid.push_back(value);
  }
  return grid;
}

json cmd_stats(std::span<const Review> raw, const StatsOptions& options) {
  if (options.top_k == 0) throw UsageError("top-k must be at least 1");
  CorpusSummary summary;
  const auto kept = clean_or_throw(raw, &summary);

  const auto unigrams = tokenize_reviews(kept, options.stopwords, {1});
  const auto bigrams = tokenize_reviews(kept, options.stopwords, {2});
  const auto n_unigram = build_vocabulary(unigrams).size();
  const auto n_bigram = build_vocabulary(bigrams).size();

  json out;
  out["cleaning"] = {{"n_raw", raw.size()},
                     {"n_clean", kept.size()},
                     {"dropped_missing_score", summary.dropped_missing_score},
                     {"dropped_empty_text", summary.dropped_empty_text}};
  out["summary"] = summary_to_json(summary);
  out["quantile_rule"] = "linear interpolation between closest ranks";
  out["vocabulary_size"] = {{"unigrams", n_unigram},
                            {"bigrams", n_bigram},
                            {"unigrams_and_bigrams", n_unigram + n_bigram}};
  out["top_unigrams"] = terms_to_json(term_frequency_report(unigrams, options.top_k));
  out["top_bigrams"] = terms_to_json(term_frequency_report(bigrams, options.top_k));
  return out;
}

TrainOutcome cmd_train(std::span<const Review> raw, const TrainOptions& options) {
  const auto spec = parse_model_spec(options.model);
  if (spec.kind == ModelKind::ridge && !options.C) {
    throw UsageError("model ridge-tfidf requires the hyperparameter C");
  }
  if (spec.kind == ModelKind::knn && !options.k) {
    throw UsageError("model knn-tfidf requires the hyperparameter k");
  }
  if (spec.kind == ModelKind::ridge && !(*options.C > 0.0 && std::isfinite(*options.C))) {
    throw UsageError("C must be positive and finite");
  }

  const auto kept = clean_or_throw(raw);
  const auto ids = positions(kept.size());
  const auto plan = split(ids, options.test_fraction, options.seed);
  const auto train = pick<std::vector<std::size_t>>(kept, plan.train_ids);
  const auto test = pick<std::vector<std::size_t>>(kept, plan.test_ids);

  TrainOutcome outcome;
  outcome.model = fit_model(spec, train, options.orders, options.stopwords, options.C, options.k);
  outcome.model.info.seed = options.seed;
  if (options.timestamp) outcome.model.info.timestamp = utc_timestamp();

  const auto report = evaluate_model(outcome.model, test);
  json out;
  out["model"] = model_spec_name(spec);
  out["params"] = report_params(spec, options.orders, outcome.model.info);
  out["seed"] = options.seed;
  out["n_train"] = train.size();
  out["n_test"] = test.size();
  out["mse"] = report.mse;
  out["mae"] = report.mae;

  if (options.examples > 0) {
    const auto n = std::min(options.examples, test.size());
    const auto rows = example_table([&](const std::string& text) { return outcome.model.predict(text); },
                                    std::span<const Review>(test).first(n));
    json table = json::array();
    for (const auto& row : rows) {
      table.push_back({{"text", row.text},
                       {"true", row.truth ? json(*row.truth) : json(nullptr)},
                       {"pred", row.prediction},
                       {"pred_rounded", row.rounded}});
    }
    out["examples"] = table;
  }
  outcome.report = std::move(out);
  return outcome;
}

json cv_result_to_json(const CvResult& result) {
  json points = json::array();
  std::vector<double> grid;
  for (const auto& p : result.points) {
    grid.push_back(p.value);
    points.push_back({{"value", p.value},
                      {"fold_mse", p.fold_mse},
                      {"mean_mse", p.mean_mse},
                      {"std_mse", p.std_mse}});
  }
  return {{"model", to_string(result.family)},
          {"param", hyperparameter_name(result.family)},
          {"grid", grid},
          {"points", points},
          {"selected", result.selected}};
}

TuneOutcome cmd_tune(std::span<const Review> raw, const TuneOptions& options) {
  const auto spec = parse_model_spec(options.model);
  if (spec.kind != ModelKind::ridge && spec.kind != ModelKind::knn) {
    throw UsageError("tune supports ridge-tfidf and knn-tfidf only");
  }
  const auto family = spec.kind == ModelKind::ridge ? ModelFamily::ridge_tfidf : ModelFamily::knn_tfidf;
  const auto grid = options.grid.empty() ? default_grid(family) : options.grid;

  const auto kept = clean_or_throw(raw);
  const auto plan = split(positions(kept.size()), options.test_fraction, options.seed);
  const auto train = pick<std::vector<std::size_t>>(kept, plan.train_ids);
  const auto test = pick<std::vector<std::size_t>>(kept, plan.test_ids);

  const auto folds = kfold(positions(train.size()), options.kf, options.seed);
  const auto cv = grid_search(family, grid, folds, train, options.orders, options.stopwords);

  TuneOutcome outcome;
  json out = cv_result_to_json(cv);
  out["orders"] = std::vector<int>(options.orders.begin(), options.orders.end());
  out["kf"] = folds.kf;
  out["seed"] = options.seed;
  out["n_train"] = train.size();
  out["n_test"] = test.size();

  if (options.retrain) {
    std::optional<double> C;
    std::optional<std::int64_t> k;
    if (family == ModelFamily::ridge_tfidf) {
      C = cv.selected;
    } else {
      k = static_cast<std::int64_t>(cv.selected);
    }
    auto model = fit_model(spec, train, options.orders, options.stopwords, C, k);
    model.info.seed = options.seed;
    if (options.timestamp) model.info.timestamp = utc_timestamp();
    out["test"] = eval_to_json(evaluate_model(model, test));
    outcome.model = std::move(model);
  }
  outcome.result = std::move(out);
  return outcome;
}

json cmd_predict_one(const TrainedModel& model, std::string_view id, std::string_view text, bool clip) {
  double pred = model.predict(text);
  if (clip) pred = std::clamp(pred, 0.0, 100.0);
  return {{"id", std::string(id)}, {"pred", pred}, {"pred_rounded", round_prediction(pred)}};
}

json cmd_explain(const TrainedModel& model, std::size_t k, bool impact) {
  const auto linear = model.linear();
  const auto ranking = impact ? top_terms_by_impact(linear, k) : top_terms(linear, k);
  return {{"model", to_string(model.kind)},
          {"k", k},
          {"ranking", impact ? "impact (weight x mean predictor)" : "weight"},
          {"positive", ranking_side(ranking.positive)},
          {"negative", ranking_side(ranking.negative)}};
}

}  // namespace grind
