#include "grind/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "grind/error.hpp"
#include "grind/featurize.hpp"
#include "grind/regress.hpp"

namespace grind {

namespace {

std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t raw = gen();
  while (raw >= limit) raw = gen();
  return raw % bound;
}

void check_metric_input(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw UsageError("metric inputs differ in length (" + std::to_string(y_true.size()) + " vs " +
                     std::to_string(y_pred.size()) + ")");
  }
  if (y_true.empty()) throw UsageError("metric of an empty sample");
}

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i-- > 1;) {
    const auto j = static_cast<std::size_t>(bounded_draw(gen, static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

SplitPlan split(std::span<const std::size_t> ids, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie in (0, 1), got " + format_value(test_fraction));
  }
  if (ids.size() < 2) throw UsageError("need at least two reviews to split");
  const auto n = ids.size();
  // The small slack keeps products such as 0.7 * 10 from rounding up a whole
  // element.
  auto n_test = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n) - 1e-9));
  if (n_test == 0 || n_test >= n) {
    throw UsageError("test fraction " + format_value(test_fraction) + " leaves an empty side for " +
                     std::to_string(n) + " reviews");
  }
  const auto perm = seeded_permutation(n, seed);
  SplitPlan plan;
  plan.seed = seed;
  plan.test_fraction = test_fraction;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_test ? plan.test_ids : plan.train_ids).push_back(ids[perm[i]]);
  }
  return plan;
}

std::vector<std::size_t> FoldPlan::training_ids(std::size_t held_out) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != held_out) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  return out;
}

FoldPlan kfold(std::span<const std::size_t> train_ids, std::int64_t kf, std::uint64_t seed) {
  if (kf < 2 || static_cast<std::uint64_t>(kf) > train_ids.size()) {
    throw UsageError("kf = " + std::to_string(kf) + " is outside [2, " +
                     std::to_string(train_ids.size()) + "]");
  }
  FoldPlan plan;
  plan.kf = static_cast<std::size_t>(kf);
  plan.seed = seed;
  plan.folds.resize(plan.kf);
  const auto perm = seeded_permutation(train_ids.size(), seed);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    plan.folds[i % plan.kf].push_back(train_ids[perm[i]]);
  }
  return plan;
}

double mse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_metric_input(y_true, y_pred);
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double d = y_true[i] - y_pred[i];
    total += d * d;
  }
  return total / static_cast<double>(y_true.size());
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
  check_metric_input(y_true, y_pred);
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) total += std::abs(y_true[i] - y_pred[i]);
  return total / static_cast<double>(y_true.size());
}

EvalReport evaluate(std::span<const double> y_true, std::span<const double> y_pred) {
  return {mse(y_true, y_pred), mae(y_true, y_pred), y_true.size()};
}

std::string_view to_string(ModelFamily family) {
  return family == ModelFamily::ridge_tfidf ? "ridge-tfidf" : "knn-tfidf";
}

std::string_view hyperparameter_name(ModelFamily family) {
  return family == ModelFamily::ridge_tfidf ? "C" : "k";
}

std::vector<double> default_grid(ModelFamily family) {
  if (family == ModelFamily::ridge_tfidf) return {0.0001, 0.001, 0.01, 0.1, 1, 10, 20};
  return {1, 11, 21, 51, 101, 201};
}

std::vector<double> scores_of(std::span<const Review> reviews) {
  std::vector<double> y;
  y.reserve(reviews.size());
  for (const auto& r : reviews) {
    if (!r.score) throw DataError("review '" + r.id + "' has no score");
    y.push_back(*r.score);
  }
  return y;
}

CvResult grid_search(ModelFamily family, std::span<const double> grid, const FoldPlan& folds,
                     std::span<const Review> corpus, const std::set<int>& orders,
                     const StopwordSet& stopwords) {
  if (grid.empty()) throw UsageError("hyperparameter grid is empty");
  if (folds.kf < 2 || folds.folds.size() != folds.kf) throw UsageError("invalid fold plan");
  const auto param = std::string(hyperparameter_name(family));
  for (double v : grid) {
    const bool ok = family == ModelFamily::ridge_tfidf
                        ? (v > 0.0 && std::isfinite(v))
                        : (v >= 1.0 && v == std::floor(v) && std::isfinite(v));
    if (!ok) throw UsageError("invalid grid value " + param + "=" + format_value(v));
  }
  for (const auto& fold : folds.folds) {
    if (fold.empty()) throw UsageError("fold plan contains an empty fold");
    for (auto id : fold) {
      if (id >= corpus.size()) throw UsageError("fold id " + std::to_string(id) + " is out of range");
    }
  }

  const auto tokenized = tokenize_reviews(corpus, stopwords, orders);
  const auto all_scores = scores_of(corpus);

  CvResult result;
  result.family = family;
  result.points.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) result.points[g].value = grid[g];

  auto with_context = [&](double value, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      throw_error(e.kind(), "grid point " + param + "=" + format_value(value) + ": " + e.what());
    }
  };

  for (std::size_t f = 0; f < folds.kf; ++f) {
    const auto train_ids = folds.training_ids(f);
    const auto& held_ids = folds.folds[f];

    std::vector<TokenizedReview> train_docs, held_docs;
    std::vector<double> y_train, y_held;
    for (auto id : train_ids) {
      train_docs.push_back(tokenized[id]);
      y_train.push_back(all_scores[id]);
    }
    for (auto id : held_ids) {
      held_docs.push_back(tokenized[id]);
      y_held.push_back(all_scores[id]);
    }

    const auto recipe = fit_recipe(train_docs, FeatureSpace::tfidf, orders, stopwords);
    auto z_train = transform(recipe, train_docs);
    const auto z_held = transform(recipe, held_docs);

    if (family == ModelFamily::ridge_tfidf) {
      const RidgeSolver solver(z_train, y_train);
      for (auto& point : result.points) {
        with_context(point.value, [&] {
          const auto fit = solver.ridge(point.value);
          std::vector<double> pred;
          pred.reserve(z_held.rows.size());
          for (const auto& row : z_held.rows) pred.push_back(predict_linear(fit, row));
          point.fold_mse.push_back(mse(y_held, pred));
        });
      }
    } else {
      const double k_max = *std::max_element(grid.begin(), grid.end());
      KnnModel model;
      with_context(k_max, [&] {
        model = fit_knn(std::move(z_train), y_train, static_cast<std::int64_t>(k_max));
      });
      std::vector<std::vector<std::size_t>> neighbors;
      neighbors.reserve(z_held.rows.size());
      for (const auto& row : z_held.rows) neighbors.push_back(knn_neighbors(model, row));
      for (auto& point : result.points) {
        const auto k = static_cast<std::size_t>(point.value);
        std::vector<double> pred;
        pred.reserve(neighbors.size());
        for (const auto& nn : neighbors) {
          pred.push_back(neighbor_mean(model.scores, std::span<const std::size_t>(nn).first(k)));
        }
        point.fold_mse.push_back(mse(y_held, pred));
      }
    }
  }

  for (auto& point : result.points) {
    const auto n = static_cast<double>(point.fold_mse.size());
    double total = 0.0;
    for (double v : point.fold_mse) total += v;
    point.mean_mse = total / n;
    double sq = 0.0;
    for (double v : point.fold_mse) sq += (v - point.mean_mse) * (v - point.mean_mse);
    point.std_mse = std::sqrt(sq / (n - 1.0));
  }

  // Exact ties prefer stronger regularization: smaller C, larger k.
  const CvPoint* best = &result.points.front();
  for (const auto& point : result.points) {
    if (point.mean_mse < best->mean_mse) {
      best = &point;
    } else if (point.mean_mse == best->mean_mse) {
      const bool stronger = family == ModelFamily::ridge_tfidf ? point.value < best->value
                                                               : point.value > best->value;
      if (stronger) best = &point;
    }
  }
  result.selected = best->value;
  return result;
}

}  // namespace grind
