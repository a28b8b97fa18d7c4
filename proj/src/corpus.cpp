#include "grind/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "grind/error.hpp"
#include "json.hpp"

namespace grind {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  auto tail = s.substr(s.size() - suffix.size());
  return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == b;
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("error while reading '" + path + "'");
  return buf.str();
}

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw DataError("malformed record at line " + std::to_string(line) + ": " + why);
}

std::optional<double> parse_score_field(std::string_view raw, std::size_t line) {
  auto s = trim(raw);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    malformed(line, "score '" + std::string(raw) + "' is not a number");
  }
  return value;
}

std::string_view strip_bom(std::string_view content) {
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  return content;
}

// ---- UTF-8 helpers for the tokenizer --------------------------------------

// Decodes one code point at `pos`; returns the byte length, 0 when invalid.
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  return cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7;
}

char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  return cp;
}

}  // namespace

InputFormat parse_input_format(std::string_view name) {
  if (name == "csv") return InputFormat::csv;
  if (name == "jsonl") return InputFormat::jsonl;
  throw UsageError("unknown input format '" + std::string(name) + "' (expected csv or jsonl)");
}

InputFormat infer_input_format(std::string_view path) {
  if (ends_with_ci(path, ".csv")) return InputFormat::csv;
  if (ends_with_ci(path, ".jsonl") || ends_with_ci(path, ".ndjson") || ends_with_ci(path, ".json")) {
    return InputFormat::jsonl;
  }
  throw UsageError("cannot infer the input format of '" + std::string(path) +
                   "'; pass csv or jsonl explicitly");
}

std::vector<Review> load_reviews(const std::string& path, InputFormat format) {
  const std::string content = read_file(path);
  return format == InputFormat::csv ? parse_csv(content) : parse_jsonl(content);
}

std::vector<Review> parse_jsonl(std::string_view content) {
  content = strip_bom(content);
  std::vector<Review> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    ++line_no;
    const auto line = trim(content.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      malformed(line_no, e.what());
    }
    if (!record.is_object()) malformed(line_no, "expected a JSON object");

    Review review;
    const auto text = record.find("text");
    if (text == record.end() || !text->is_string()) malformed(line_no, "missing string field 'text'");
    review.text = text->get<std::string>();

    const auto score = record.find("score");
    if (score != record.end() && !score->is_null()) {
      if (!score->is_number()) malformed(line_no, "field 'score' must be a number or null");
      review.score = score->get<double>();
    }

    const auto id = record.find("id");
    if (id != record.end() && id->is_string()) {
      review.id = id->get<std::string>();
    } else if (id != record.end() && id->is_number()) {
      review.id = id->dump();
    } else {
      review.id = std::to_string(out.size() + 1);
    }
    out.push_back(std::move(review));
  }
  return out;
}

std::vector<Review> parse_csv(std::string_view content) {
  content = strip_bom(content);

  struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
  };
  std::vector<Record> records;

  // RFC 4180 state machine; quoted fields may span lines.
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = content.size();
  while (i < n) {
    Record rec;
    rec.line = line;
    bool end_of_record = false;
    while (!end_of_record) {
      std::string field;
      if (i < n && content[i] == '"') {
        ++i;
        bool closed = false;
        while (i < n) {
          const char c = content[i];
          if (c == '"') {
            if (i + 1 < n && content[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            closed = true;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        if (!closed) malformed(rec.line, "unterminated quoted field");
        if (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          malformed(line, "unexpected character after closing quote");
        }
      } else {
        while (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
          field.push_back(content[i]);
          ++i;
        }
      }
      rec.fields.push_back(std::move(field));

      if (i >= n) {
        end_of_record = true;
      } else if (content[i] == ',') {
        ++i;
      } else {
        if (content[i] == '\r') ++i;
        if (i < n && content[i] == '\n') ++i;
        ++line;
        end_of_record = true;
      }
    }
    const bool blank = rec.fields.size() == 1 && rec.fields.front().empty();
    if (!blank) records.push_back(std::move(rec));
  }

  if (records.empty()) return {};

  const auto& header = records.front().fields;
  std::optional<std::size_t> text_col, score_col, id_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name == "text") text_col = c;
    if (name == "score") score_col = c;
    if (name == "id") id_col = c;
  }
  if (!text_col || !score_col) malformed(1, "header must contain 'text' and 'score' columns");

  std::vector<Review> out;
  out.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      malformed(rec.line, "expected " + std::to_string(header.size()) + " fields, found " +
                              std::to_string(rec.fields.size()));
    }
    Review review;
    review.text = rec.fields[*text_col];
    review.score = parse_score_field(rec.fields[*score_col], rec.line);
    review.id = id_col ? rec.fields[*id_col] : std::to_string(r);
    out.push_back(std::move(review));
  }
  return out;
}

CorpusSummary summarize_scores(std::span<const double> scores) {
  CorpusSummary s;
  s.count = scores.size();
  if (scores.empty()) {
    const double nan = std::nan("");
    s.mean = s.min = s.q1 = s.median = s.q3 = s.max = nan;
    return s;
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());

  auto quantile = [&](double q) {
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };

  double total = 0.0;
  for (double v : scores) total += v;
  s.mean = total / static_cast<double>(scores.size());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  return s;
}

std::pair<std::vector<Review>, CorpusSummary> clean(std::span<const Review> reviews) {
  std::vector<Review> kept;
  kept.reserve(reviews.size());
  std::size_t missing = 0;
  std::size_t empty = 0;
  for (const auto& review : reviews) {
    const bool valid_score = review.score && std::isfinite(*review.score) && *review.score >= 0.0 &&
                             *review.score <= 100.0;
    if (!valid_score) {
      ++missing;
    } else if (trim(review.text).empty()) {
      ++empty;
    } else {
      kept.push_back(review);
    }
  }

  std::vector<double> scores;
  scores.reserve(kept.size());
  for (const auto& review : kept) scores.push_back(*review.score);
  CorpusSummary summary = summarize_scores(scores);
  summary.dropped_missing_score = missing;
  summary.dropped_empty_text = empty;
  return {std::move(kept), summary};
}

// ---- stopwords --------------------------------------------------------------

StopwordSet::StopwordSet(std::vector<std::string> words) : sorted_(std::move(words)) {
  std::sort(sorted_.begin(), sorted_.end());
  sorted_.erase(std::unique(sorted_.begin(), sorted_.end()), sorted_.end());
  lookup_.insert(sorted_.begin(), sorted_.end());
}

StopwordSet StopwordSet::parse(std::string_view content) {
  content = strip_bom(content);
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const auto word = trim(content.substr(start, end - start));
    start = end + 1;
    if (word.empty() || word.front() == '#') continue;
    words.emplace_back(word);
  }
  return StopwordSet(std::move(words));
}

StopwordSet StopwordSet::from_file(const std::string& path) { return parse(read_file(path)); }

StopwordSet StopwordSet::english() {
  static const StopwordSet bundled = parse(default_stopwords_text());
  return bundled;
}

bool StopwordSet::contains(std::string_view word) const {
  return lookup_.find(std::string(word)) != lookup_.end();
}

std::string StopwordSet::fingerprint() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  bool first = true;
  for (const auto& w : sorted_) {
    if (!first) hash = (hash ^ static_cast<unsigned char>('\n')) * 0x100000001b3ULL;
    first = false;
    for (unsigned char c : w) hash = (hash ^ c) * 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash;
  return os.str();
}

// ---- tokenization -------------------------------------------------------------

std::vector<std::string> tokenize(std::string_view text, const StopwordSet& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      if (!stopwords.contains(current)) tokens.push_back(current);
      current.clear();
    }
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, pos, cp);
    if (len == 0) {
      flush();
      ++pos;
      continue;
    }
    pos += len;
    if (is_letter(cp)) {
      append_utf8(current, to_lower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> extract_ngrams(std::span<const std::string> tokens,
                                        const std::set<int>& orders) {
  for (int order : orders) {
    if (order != 1 && order != 2) {
      throw UsageError("n-gram order " + std::to_string(order) + " is not supported (use 1 or 2)");
    }
  }
  std::vector<std::string> out;
  for (int order : orders) {
    const auto n = static_cast<std::size_t>(order);
    if (tokens.size() < n) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      if (n == 1) {
        out.push_back(tokens[i]);
      } else {
        out.push_back(tokens[i] + ' ' + tokens[i + 1]);
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::size_t>> term_frequency_report(
    std::span<const TokenizedReview> tokenized, std::size_t top_k) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : tokenized) {
    for (const auto& term : doc.terms) ++counts[term];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  auto by_count = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const auto keep = std::min(top_k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    by_count);
  ranked.resize(keep);
  return ranked;
}

}  // namespace grind
