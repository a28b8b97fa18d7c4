#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "grind/corpus.hpp"

namespace grind {

/// Column space learned from training documents. Terms keep first-appearance
/// order; doc_freq counts documents, not occurrences.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq, std::size_t n_docs);

  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n_docs() const noexcept { return n_docs_; }
  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }
  std::optional<std::size_t> find(std::string_view term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SparseEntry {
  std::size_t index;
  double value;
  bool operator==(const SparseEntry&) const = default;
};

/// Entries are sorted by strictly increasing index, all below `dim`, and
/// never hold an exact zero.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<SparseEntry> entries;

  double dot(std::span<const double> dense) const;
  double sum() const;
  bool operator==(const SparseVector&) const = default;
};

struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<SparseVector> rows;
  std::vector<std::string> row_ids;

  std::size_t n_rows() const noexcept { return rows.size(); }
  /// Appends a row; throws UsageError when its dimension differs.
  void add_row(SparseVector row, std::string id);
};

/// idf[j] = ln(N / (1 + df_j)). Negative values are kept.
struct IdfModel {
  std::vector<double> idf;
};

/// Throws DataError on an empty corpus.
Vocabulary build_vocabulary(std::span<const TokenizedReview> tokenized);

SparseVector count_vector(std::span<const std::string> terms, const Vocabulary& vocab);

/// Document frequencies are recomputed from the nonzero pattern of the rows.
IdfModel fit_idf(const FeatureMatrix& train_matrix, const Vocabulary& vocab);

/// TF is the per-document share x_ij / sum_k x_ik, multiplied by idf[j].
/// Zero products are dropped.
SparseVector tfidf_transform(const SparseVector& counts, const IdfModel& idf);

enum class FeatureSpace { counts, tfidf };

std::string_view to_string(FeatureSpace space);
FeatureSpace parse_feature_space(std::string_view name);

/// Everything needed to map raw text to a predictor vector.
struct FeatureRecipe {
  FeatureSpace space = FeatureSpace::counts;
  std::set<int> orders{1};
  StopwordSet stopwords;
  Vocabulary vocabulary;
  std::optional<IdfModel> idf;

  /// tokenize followed by extract_ngrams.
  std::vector<std::string> terms(std::string_view text) const;
  SparseVector vectorize(std::span<const std::string> terms) const;
  SparseVector featurize(std::string_view text) const { return vectorize(terms(text)); }
};

/// Builds the vocabulary (and the IDF weights for the TF-IDF space) from the
/// training documents, which must already hold n-gram terms for `orders`.
FeatureRecipe fit_recipe(std::span<const TokenizedReview> train, FeatureSpace space,
                         std::set<int> orders, StopwordSet stopwords);

/// Applies the recipe to pre-tokenized documents.
FeatureMatrix transform(const FeatureRecipe& recipe, std::span<const TokenizedReview> docs);

/// tokenize + extract_ngrams over every review.
std::vector<TokenizedReview> tokenize_reviews(std::span<const Review> reviews,
                                              const StopwordSet& stopwords,
                                              const std::set<int>& orders);

}  // namespace grind
