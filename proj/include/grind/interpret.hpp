#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grind/corpus.hpp"

namespace grind {

struct LinearModel;

using WeightedTerm = std::pair<std::string, double>;

struct SentimentRanking {
  std::vector<WeightedTerm> positive;  // descending weight
  std::vector<WeightedTerm> negative;  // ascending weight
  std::size_t k = 0;
};

/// Strongest signed weights per side; zero weights never appear, equal
/// weights are ordered by term.
SentimentRanking top_terms(std::span<const std::string> terms, std::span<const double> weights,
                           std::size_t k);
SentimentRanking top_terms(const LinearModel& model, std::size_t k);

/// Ranks by weight times the training mean of the predictor instead of the
/// raw weight.
SentimentRanking top_terms_by_impact(const LinearModel& model, std::size_t k);

/// Half-away-from-zero rounding to an integer value.
double round_prediction(double prediction);

struct ExampleRow {
  std::string text;
  std::optional<double> truth;
  double prediction = 0.0;
  double rounded = 0.0;
};

template <typename Predictor>
std::vector<ExampleRow> example_table(const Predictor& predict, std::span<const Review> reviews) {
  std::vector<ExampleRow> rows;
  rows.reserve(reviews.size());
  for (const auto& review : reviews) {
    const double pred = predict(review.text);
    rows.push_back({review.text, review.score, pred, round_prediction(pred)});
  }
  return rows;
}

}  // namespace grind
