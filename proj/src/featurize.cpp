#include "grind/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "grind/error.hpp"

namespace grind {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       std::size_t n_docs)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), n_docs_(n_docs) {
  if (terms_.size() != doc_freq_.size()) {
    throw DataError("vocabulary has " + std::to_string(terms_.size()) + " terms but " +
                    std::to_string(doc_freq_.size()) + " document frequencies");
  }
  index_.reserve(terms_.size());
  for (std::size_t j = 0; j < terms_.size(); ++j) {
    if (!index_.emplace(terms_[j], j).second) {
      throw DataError("duplicate vocabulary term '" + terms_[j] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double SparseVector::dot(std::span<const double> dense) const {
  double total = 0.0;
  for (const auto& e : entries) total += e.value * dense[e.index];
  return total;
}

double SparseVector::sum() const {
  double total = 0.0;
  for (const auto& e : entries) total += e.value;
  return total;
}

void FeatureMatrix::add_row(SparseVector row, std::string id) {
  if (row.dim != dim) {
    throw UsageError("row dimension " + std::to_string(row.dim) + " does not match matrix dimension " +
                     std::to_string(dim));
  }
  rows.push_back(std::move(row));
  row_ids.push_back(std::move(id));
}

Vocabulary build_vocabulary(std::span<const TokenizedReview> tokenized) {
  if (tokenized.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::vector<std::string> terms;
  std::vector<std::size_t> doc_freq;
  std::unordered_map<std::string, std::size_t> index;
  // Document index that last bumped each term's frequency.
  std::vector<std::size_t> last_doc;
  for (std::size_t d = 0; d < tokenized.size(); ++d) {
    for (const auto& term : tokenized[d].terms) {
      auto [it, inserted] = index.emplace(term, terms.size());
      if (inserted) {
        terms.push_back(term);
        doc_freq.push_back(1);
        last_doc.push_back(d);
      } else if (last_doc[it->second] != d) {
        ++doc_freq[it->second];
        last_doc[it->second] = d;
      }
    }
  }
  return Vocabulary(std::move(terms), std::move(doc_freq), tokenized.size());
}

SparseVector count_vector(std::span<const std::string> terms, const Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (const auto& term : terms) {
    if (auto j = vocab.find(term)) counts[*j] += 1.0;
  }
  SparseVector v;
  v.dim = vocab.size();
  v.entries.reserve(counts.size());
  for (const auto& [j, c] : counts) v.entries.push_back({j, c});
  return v;
}

IdfModel fit_idf(const FeatureMatrix& train_matrix, const Vocabulary& vocab) {
  if (train_matrix.dim != vocab.size()) {
    throw UsageError("feature matrix dimension does not match the vocabulary");
  }
  if (vocab.n_docs() != train_matrix.n_rows()) {
    throw UsageError("vocabulary was built from " + std::to_string(vocab.n_docs()) +
                     " documents but the matrix has " + std::to_string(train_matrix.n_rows()) + " rows");
  }
  std::vector<std::size_t> df(vocab.size(), 0);
  for (const auto& row : train_matrix.rows) {
    for (const auto& e : row.entries) ++df[e.index];
  }
  const auto n = static_cast<double>(train_matrix.n_rows());
  IdfModel model;
  model.idf.resize(vocab.size());
  for (std::size_t j = 0; j < df.size(); ++j) {
    model.idf[j] = std::log(n / (1.0 + static_cast<double>(df[j])));
  }
  return model;
}

SparseVector tfidf_transform(const SparseVector& counts, const IdfModel& idf) {
  if (counts.dim != idf.idf.size()) {
    throw UsageError("count vector dimension does not match the IDF model");
  }
  SparseVector out;
  out.dim = counts.dim;
  const double total = counts.sum();
  if (total == 0.0) return out;
  out.entries.reserve(counts.entries.size());
  for (const auto& e : counts.entries) {
    const double z = (e.value / total) * idf.idf[e.index];
    if (z != 0.0) out.entries.push_back({e.index, z});
  }
  return out;
}

std::string_view to_string(FeatureSpace space) {
  return space == FeatureSpace::counts ? "counts" : "tfidf";
}

FeatureSpace parse_feature_space(std::string_view name) {
  if (name == "counts") return FeatureSpace::counts;
  if (name == "tfidf") return FeatureSpace::tfidf;
  throw DataError("unknown feature space '" + std::string(name) + "'");
}

std::vector<std::string> FeatureRecipe::terms(std::string_view text) const {
  const auto tokens = tokenize(text, stopwords);
  return extract_ngrams(tokens, orders);
}

SparseVector FeatureRecipe::vectorize(std::span<const std::string> doc_terms) const {
  auto counts = count_vector(doc_terms, vocabulary);
  if (space == FeatureSpace::counts) return counts;
  if (!idf) throw UsageError("TF-IDF recipe has no IDF weights");
  return tfidf_transform(counts, *idf);
}

FeatureRecipe fit_recipe(std::span<const TokenizedReview> train, FeatureSpace space,
                         std::set<int> orders, StopwordSet stopwords) {
  FeatureRecipe recipe;
  recipe.space = space;
  recipe.orders = std::move(orders);
  recipe.stopwords = std::move(stopwords);
  recipe.vocabulary = build_vocabulary(train);
  if (space == FeatureSpace::tfidf) {
    FeatureMatrix counts;
    counts.dim = recipe.vocabulary.size();
    for (const auto& doc : train) counts.add_row(count_vector(doc.terms, recipe.vocabulary), doc.id);
    recipe.idf = fit_idf(counts, recipe.vocabulary);
  }
  return recipe;
}

FeatureMatrix transform(const FeatureRecipe& recipe, std::span<const TokenizedReview> docs) {
  FeatureMatrix matrix;
  matrix.dim = recipe.vocabulary.size();
  matrix.rows.reserve(docs.size());
  matrix.row_ids.reserve(docs.size());
  for (const auto& doc : docs) matrix.add_row(recipe.vectorize(doc.terms), doc.id);
  return matrix;
}

std::vector<TokenizedReview> tokenize_reviews(std::span<const Review> reviews,
                                              const StopwordSet& stopwords,
                                              const std::set<int>& orders) {
  std::vector<TokenizedReview> out;
  out.reserve(reviews.size());
  for (const auto& review : reviews) {
    out.push_back({review.id, extract_ngrams(tokenize(review.text, stopwords), orders)});
  }
  return out;
}

}  // namespace grind
