#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "grind/corpus.hpp"

namespace grind {

/// Deterministic Fisher-Yates permutation of 0..n-1.
///
/// The generator is std::mt19937_64 seeded with `seed`, whose output sequence
/// is fixed by the C++ standard. For i = n-1 down to 1, a draw j in [0, i] is
/// taken by rejection: raw 64-bit outputs at or above the largest multiple of
/// (i + 1) are discarded and j = raw % (i + 1); positions i and j are then
/// swapped. No standard distribution objects are used, so the permutation is
/// identical on every platform.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct SplitPlan {
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> test_ids;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

/// Shuffles `ids` with seeded_permutation; the first ceil(fraction * n) form
/// the test set. Throws UsageError for fractions outside (0, 1), fewer than two
/// ids, or a split that would leave either side empty.
SplitPlan split(std::span<const std::size_t> ids, double test_fraction, std::uint64_t seed);

struct FoldPlan {
  std::size_t kf = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;

  /// Every id not in fold `held_out`, in fold order.
  std::vector<std::size_t> training_ids(std::size_t held_out) const;
};

/// Shuffled round-robin: the i-th shuffled id goes to fold i % kf.
/// Throws UsageError unless 2 <= kf <= |train_ids|.
FoldPlan kfold(std::span<const std::size_t> train_ids, std::int64_t kf, std::uint64_t seed);

struct EvalReport {
  double mse = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
};

/// Mean squared error. Throws UsageError on empty or mismatched input.
double mse(std::span<const double> y_true, std::span<const double> y_pred);
/// Mean absolute error. Throws UsageError on empty or mismatched input.
double mae(std::span<const double> y_true, std::span<const double> y_pred);
EvalReport evaluate(std::span<const double> y_true, std::span<const double> y_pred);

enum class ModelFamily { ridge_tfidf, knn_tfidf };

std::string_view to_string(ModelFamily family);
/// Hyperparameter name: "C" or "k".
std::string_view hyperparameter_name(ModelFamily family);
/// {0.0001, 0.001, 0.01, 0.1, 1, 10, 20} for ridge, {1, 11, 21, 51, 101, 201}
/// for K-NN.
std::vector<double> default_grid(ModelFamily family);

struct CvPoint {
  double value = 0.0;
  std::vector<double> fold_mse;
  double mean_mse = 0.0;
  /// Sample standard deviation (n - 1 denominator) of fold_mse.
  double std_mse = 0.0;
};

struct CvResult {
  ModelFamily family = ModelFamily::ridge_tfidf;
  std::vector<CvPoint> points;
  double selected = 0.0;
};

/// k-fold cross-validation over a hyperparameter grid. Fold ids index into
/// `corpus`, whose reviews must all carry scores. For each fold the
/// vocabulary and IDF weights are refit on the remaining folds only. The
/// selected value minimizes the mean fold MSE; exact ties go to the smaller C
/// or the larger k.
CvResult grid_search(ModelFamily family, std::span<const double> grid, const FoldPlan& folds,
                     std::span<const Review> corpus, const std::set<int>& orders,
                     const StopwordSet& stopwords);

/// Scores of the given reviews; throws DataError when one is missing.
std::vector<double> scores_of(std::span<const Review> reviews);

}  // namespace grind
