#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "grind/featurize.hpp"

namespace grind {

struct NaiveModel {
  double mean_score = 0.0;
};

/// Throws UsageError on empty input.
NaiveModel fit_naive(std::span<const double> y);

/// Intercept and weights of a fitted linear predictor.
struct LinearFit {
  double intercept = 0.0;
  std::vector<double> weights;
  /// Training mean of every predictor column (the centering offsets).
  std::vector<double> column_means;
  /// Norm of the training objective's gradient at the returned solution.
  double gradient_norm = 0.0;
};

/// Solves least squares and ridge problems for one training set, with the
/// intercept left unpenalized by centering.
///
/// The centered Gram matrix of the smaller side is formed once, either
/// Zc^T Zc (m <= p) or Zc Zc^T (m > p), and eigendecomposed, so every
/// penalty value costs one back-substitution. The ridge system solved is
/// (Zc^T Zc + lambda I) beta = Zc^T yc with lambda = p / (2C); lambda = 0
/// gives the minimum-norm least-squares solution through the pseudoinverse.
/// Each solution is polished by iterative refinement against residuals
/// computed from the sparse rows, then certified: the objective gradient
/// norm must not exceed 1e-8 (1 + ||y||), otherwise NumericError.
class RidgeSolver {
 public:
  RidgeSolver(const FeatureMatrix& features, std::span<const double> targets);
  ~RidgeSolver();
  RidgeSolver(RidgeSolver&&) noexcept;
  RidgeSolver& operator=(RidgeSolver&&) noexcept;

  /// Minimizes (1/p) sum (a + b.z_i - y_i)^2 + (1/(2C)) ||b||^2.
  LinearFit ridge(double C) const;
  /// Minimizes (1/p) sum (a + b.z_i - y_i)^2; minimum-norm b when not unique.
  LinearFit least_squares() const;

  /// True when the solver works on the p x p (dual) Gram matrix.
  bool dual() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  LinearFit solve(double lambda, std::optional<double> C) const;
};

LinearFit fit_least_squares(const FeatureMatrix& features, std::span<const double> y);

/// Throws UsageError when C <= 0 or not finite.
LinearFit fit_ridge(const FeatureMatrix& features, std::span<const double> y, double C);

/// Gradient norm of (1/p) sum (a + b.z_i - y_i)^2 [+ (1/(2C)) ||b||^2] with
/// respect to (a, b).
double objective_gradient_norm(const FeatureMatrix& features, std::span<const double> y,
                               double intercept, std::span<const double> weights,
                               std::optional<double> C = std::nullopt);

/// Certificate bound shared by both linear fits.
double gradient_tolerance(std::span<const double> y);

double predict_linear(const LinearFit& fit, const SparseVector& features);

struct LinearModel {
  LinearFit fit;
  FeatureRecipe recipe;
};

double predict_linear(const LinearModel& model, std::string_view text);

/// Stores TF-IDF training rows verbatim.
struct KnnModel {
  FeatureMatrix train;
  std::vector<double> scores;
  std::size_t k = 1;
};

/// Throws UsageError unless 1 <= k <= rows and the score count matches.
KnnModel fit_knn(FeatureMatrix train, std::vector<double> scores, std::int64_t k);

double euclidean_distance(const SparseVector& a, const SparseVector& b);

/// Indices of the k nearest training rows, nearest first; equal distances
/// are ordered by ascending training index.
std::vector<std::size_t> knn_neighbors(const KnnModel& model, const SparseVector& query);

/// Mean of `scores` over `neighbors`, summed in the given order and kept
/// inside the neighbours' score range.
double neighbor_mean(std::span<const double> scores, std::span<const std::size_t> neighbors);

/// Mean score of the k nearest training rows.
double predict_knn(const KnnModel& model, const SparseVector& query);

}  // namespace grind
