#include "grind/interpret.hpp"

#include <algorithm>
#include <cmath>

#include "grind/error.hpp"
#include "grind/regress.hpp"

namespace grind {

SentimentRanking top_terms(std::span<const std::string> terms, std::span<const double> weights,
                           std::size_t k) {
  if (terms.size() != weights.size()) throw UsageError("term and weight counts differ");
  if (k == 0) throw UsageError("k must be at least 1");
  SentimentRanking ranking;
  ranking.k = k;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (weights[j] > 0.0) ranking.positive.emplace_back(terms[j], weights[j]);
    if (weights[j] < 0.0) ranking.negative.emplace_back(terms[j], weights[j]);
  }
  auto take = [k](std::vector<WeightedTerm>& side, auto stronger) {
    const auto keep = std::min(k, side.size());
    std::partial_sort(side.begin(), side.begin() + static_cast<std::ptrdiff_t>(keep), side.end(),
                      [&](const WeightedTerm& a, const WeightedTerm& b) {
                        return a.second != b.second ? stronger(a.second, b.second) : a.first < b.first;
                      });
    side.resize(keep);
  };
  take(ranking.positive, std::greater<double>());
  take(ranking.negative, std::less<double>());
  return ranking;
}

SentimentRanking top_terms(const LinearModel& model, std::size_t k) {
  return top_terms(model.recipe.vocabulary.terms(), model.fit.weights, k);
}

SentimentRanking top_terms_by_impact(const LinearModel& model, std::size_t k) {
  const auto& w = model.fit.weights;
  const auto& means = model.fit.column_means;
  if (means.size() != w.size()) throw UsageError("model carries no predictor means");
  std::vector<double> impact(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) impact[j] = w[j] * means[j];
  return top_terms(model.recipe.vocabulary.terms(), impact, k);
}

double round_prediction(double prediction) { return std::round(prediction); }

}  // namespace grind
