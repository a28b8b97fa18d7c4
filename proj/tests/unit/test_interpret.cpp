#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "grind/error.hpp"
#include "grind/interpret.hpp"
#include "grind/regress.hpp"

using namespace grind;

TEST(TopTerms, Example) {
  const std::vector<std::string> terms{"sweet", "harsh", "cedar", "flat", "lush", "plain"};
  const std::vector<double> w{2.0, -3.0, 0.5, -0.2, 1.0, 0.0};
  const auto r = top_terms(terms, w, 2);
  ASSERT_EQ(r.positive.size(), 2u);
  EXPECT_EQ(r.positive[0], (WeightedTerm{"sweet", 2.0}));
  EXPECT_EQ(r.positive[1], (WeightedTerm{"lush", 1.0}));
  ASSERT_EQ(r.negative.size(), 2u);
  EXPECT_EQ(r.negative[0], (WeightedTerm{"harsh", -3.0}));
  EXPECT_EQ(r.negative[1], (WeightedTerm{"flat", -0.2}));
}

TEST(TopTerms, ShortSidesAndZeroWeights) {
  const std::vector<std::string> terms{"a", "b", "c"};
  const std::vector<double> w{0.0, 1.0, 0.0};
  const auto r = top_terms(terms, w, 5);
  EXPECT_EQ(r.positive.size(), 1u);
  EXPECT_TRUE(r.negative.empty());
  EXPECT_THROW(top_terms(terms, std::vector<double>{1.0}, 1), UsageError);
  EXPECT_THROW(top_terms(terms, w, 0), UsageError);
}

TEST(TopTerms, TiesOrderedByTerm) {
  const std::vector<std::string> terms{"zest", "acid", "malt"};
  const std::vector<double> w{1.5, 1.5, 1.5};
  const auto r = top_terms(terms, w, 3);
  EXPECT_EQ(r.positive[0].first, "acid");
  EXPECT_EQ(r.positive[1].first, "malt");
  EXPECT_EQ(r.positive[2].first, "zest");
}

TEST(TopTerms, InvariantUnderColumnPermutation) {
  std::mt19937_64 gen(71);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> terms;
    std::vector<double> w;
    for (int j = 0; j < 40; ++j) {
      terms.push_back("t" + std::to_string(j));
      w.push_back(u(gen));
    }
    std::vector<std::size_t> order(terms.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<std::string> pt;
    std::vector<double> pw;
    for (auto j : order) {
      pt.push_back(terms[j]);
      pw.push_back(w[j]);
    }
    const auto a = top_terms(terms, w, 7);
    const auto b = top_terms(pt, pw, 7);
    EXPECT_EQ(a.positive, b.positive);
    EXPECT_EQ(a.negative, b.negative);
    for (std::size_t i = 1; i < a.positive.size(); ++i) EXPECT_GE(a.positive[i - 1].second, a.positive[i].second);
    for (std::size_t i = 1; i < a.negative.size(); ++i) EXPECT_LE(a.negative[i - 1].second, a.negative[i].second);
  }
}

TEST(TopTerms, ImpactUsesColumnMeans) {
  LinearModel model;
  model.recipe.vocabulary = Vocabulary({"rare", "common"}, {1, 9}, 10);
  model.fit.weights = {5.0, 1.0};
  model.fit.column_means = {0.01, 0.5};
  const auto r = top_terms_by_impact(model, 1);
  EXPECT_EQ(r.positive[0].first, "common");
  EXPECT_EQ(top_terms(model, 1).positive[0].first, "rare");
}

TEST(Rounding, HalfAwayFromZero) {
  EXPECT_EQ(round_prediction(94.5), 95.0);
  EXPECT_EQ(round_prediction(92.49), 92.0);
  EXPECT_EQ(round_prediction(88.0), 88.0);
  EXPECT_EQ(round_prediction(-0.5), -1.0);
}

TEST(ExampleTable, CarriesTruthAndRounding) {
  const std::vector<Review> reviews{{"1", "good", 91.0}, {"2", "bad", std::nullopt}};
  const auto rows = example_table([](std::string_view t) { return t == "good" ? 92.6 : 85.2; }, reviews);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].truth, 91.0);
  EXPECT_EQ(rows[0].rounded, 93.0);
  EXPECT_FALSE(rows[1].truth.has_value());
  EXPECT_EQ(rows[1].rounded, 85.0);
}
