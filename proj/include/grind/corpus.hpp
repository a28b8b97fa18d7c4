#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace grind {

/// One scored review. `score` is empty when the source record had no usable
/// value (absent, null).
struct Review {
  std::string id;
  std::string text;
  std::optional<double> score;
};

struct TokenizedReview {
  std::string id;
  std::vector<std::string> terms;
};

/// Cleaning counters plus a five-number summary of the surviving scores.
/// Quantiles use linear interpolation between closest ranks: for sorted
/// scores s[0..n-1] and probability q, h = (n - 1) q and the quantile is
/// s[floor h] + (h - floor h) (s[ceil h] - s[floor h]).
/// With no survivors every real-valued field is NaN.
struct CorpusSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::size_t dropped_missing_score = 0;
  std::size_t dropped_empty_text = 0;
};

enum class InputFormat { csv, jsonl };

/// Parses "csv" or "jsonl"; throws UsageError otherwise.
InputFormat parse_input_format(std::string_view name);

/// Picks the format from the file extension (.csv, .jsonl, .json, .ndjson).
InputFormat infer_input_format(std::string_view path);

/// Reads every record in file order without cleaning. A record id comes from
/// an `id` field/column when present, otherwise it is the 1-based record
/// number. Throws DataError on I/O failure or a malformed record (with the
/// offending line number).
std::vector<Review> load_reviews(const std::string& path, InputFormat format);

/// Stream variants used by load_reviews; exposed for in-memory fixtures.
std::vector<Review> parse_jsonl(std::string_view content);
std::vector<Review> parse_csv(std::string_view content);

/// Drops reviews whose score is missing, non-finite or outside [0, 100]
/// (counted as missing) and then reviews whose text is blank after trimming.
std::pair<std::vector<Review>, CorpusSummary> clean(std::span<const Review> reviews);

/// Five-number summary of the given scores (counters left at zero).
CorpusSummary summarize_scores(std::span<const double> scores);

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::vector<std::string> words);

  /// One word per line; blank lines and lines starting with '#' are ignored.
  static StopwordSet parse(std::string_view content);
  static StopwordSet from_file(const std::string& path);
  /// The bundled English list.
  static StopwordSet english();

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  /// Sorted, duplicate-free words.
  const std::vector<std::string>& words() const noexcept { return sorted_; }
  /// FNV-1a 64-bit hash over the sorted words joined by '\n', as 16 hex digits.
  std::string fingerprint() const;

 private:
  std::vector<std::string> sorted_;
  std::unordered_set<std::string> lookup_;
};

std::string_view default_stopwords_text();

/// Lowercases, splits on maximal runs of non-alphabetic characters and drops
/// stopwords. Alphabetic means ASCII letters plus the Latin letters in
/// U+00C0..U+024F (excluding U+00D7 and U+00F7); text is decoded as UTF-8 and
/// undecodable bytes act as separators. ASCII and Latin-1 capitals are
/// lowercased.
std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords);

/// Contiguous n-grams for each order in ascending order; bigram constituents
/// are joined by one space. Orders must be 1 or 2.
std::vector<std::string> extract_ngrams(std::span<const std::string> tokens,
                                        const std::set<int>& orders);

/// Terms by total count descending, ties lexicographic ascending, at most
/// `top_k` entries.
std::vector<std::pair<std::string, std::size_t>> term_frequency_report(
    std::span<const TokenizedReview> tokenized, std::size_t top_k);

}  // namespace grind
