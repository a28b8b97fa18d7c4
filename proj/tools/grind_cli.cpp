// Command-line front end over the grind C API.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "grind/grind.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct CliFailure {
  int code;
};

struct CorpusDeleter {
  void operator()(grind_corpus* c) const { grind_corpus_free(c); }
};
struct ModelDeleter {
  void operator()(grind_model* m) const { grind_model_free(m); }
};
struct StringDeleter {
  void operator()(char* s) const { grind_string_free(s); }
};
using CorpusPtr = std::unique_ptr<grind_corpus, CorpusDeleter>;
using ModelPtr = std::unique_ptr<grind_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

void check(grind_status status) {
  if (status != GRIND_OK) {
    std::cerr << "grind: " << grind_last_error() << '\n';
    throw CliFailure{static_cast<int>(status)};
  }
}

[[noreturn]] void usage_failure(const std::string& message) {
  std::cerr << "grind: " << message << '\n';
  throw CliFailure{GRIND_ERROR_USAGE};
}

std::optional<std::string> resolve_stopwords(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GRIND_STOPWORDS"); env && *env) return std::string(env);
  return std::nullopt;
}

const char* c_str_or_null(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

CorpusPtr load_corpus(const std::string& path, const std::string& format) {
  grind_corpus* raw = nullptr;
  check(grind_corpus_load(path.c_str(), format.empty() ? nullptr : format.c_str(), &raw));
  return CorpusPtr(raw);
}

ModelPtr load_model(const std::string& path) {
  grind_model* raw = nullptr;
  check(grind_model_load(path.c_str(), &raw));
  return ModelPtr(raw);
}

json take_json(char* text) {
  StringPtr owned(text);
  return json::parse(owned.get());
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string num(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return fixed(v.get<double>());
}

void print_json(const json& doc) { std::cout << doc.dump(2) << '\n'; }

// ---- text renderers -------------------------------------------------------

void render_stats(const json& s) {
  const auto& c = s["cleaning"];
  std::cout << "records read           " << c["n_raw"] << '\n'
            << "dropped (no score)     " << c["dropped_missing_score"] << '\n'
            << "dropped (empty text)   " << c["dropped_empty_text"] << '\n'
            << "reviews kept           " << c["n_clean"] << "\n\n";
  const auto& m = s["summary"];
  std::cout << "score  mean " << num(m["mean"]) << "  min " << num(m["min"]) << "  q1 " << num(m["q1"])
            << "  median " << num(m["median"]) << "  q3 " << num(m["q3"]) << "  max " << num(m["max"])
            << "\n";
  const auto& v = s["vocabulary_size"];
  std::cout << "vocabulary  unigrams " << v["unigrams"] << "  bigrams " << v["bigrams"] << "\n";
  for (const char* key : {"top_unigrams", "top_bigrams"}) {
    std::cout << '\n' << key << '\n';
    for (const auto& t : s[key]) {
      std::cout << "  " << std::left << std::setw(32) << t["term"].get<std::string>() << std::right
                << std::setw(8) << t["count"] << '\n';
    }
  }
}

void render_eval(const json& r) {
  std::cout << "model    " << r["model"].get<std::string>() << '\n'
            << "params   " << r["params"].dump() << '\n'
            << "seed     " << r["seed"] << '\n'
            << "n_train  " << r["n_train"] << "   n_test " << r["n_test"] << '\n'
            << "MSE      " << num(r["mse"]) << '\n'
            << "MAE      " << num(r["mae"]) << '\n';
  if (r.contains("examples")) {
    std::cout << "\n  true    pred  text\n";
    for (const auto& row : r["examples"]) {
      std::cout << std::setw(6) << num(row["true"]) << "  " << std::setw(6)
                << fixed(row["pred_rounded"].get<double>(), 0) << "  " << row["text"].get<std::string>()
                << '\n';
    }
  }
}

void render_cv(const json& r) {
  const auto param = r["param"].get<std::string>();
  std::cout << "model " << r["model"].get<std::string>() << "  orders " << r["orders"].dump() << "  kf "
            << r["kf"] << "  seed " << r["seed"] << "\n\n";
  std::cout << std::setw(10) << param << std::setw(12) << "mean MSE" << std::setw(12) << "std MSE"
            << "  fold MSEs\n";
  for (const auto& p : r["points"]) {
    std::cout << std::setw(10) << p["value"].get<double>() << std::setw(12) << fixed(p["mean_mse"].get<double>(), 4)
              << std::setw(12) << num(p["std_mse"]) << " ";
    for (const auto& f : p["fold_mse"]) std::cout << ' ' << fixed(f.get<double>(), 4);
    std::cout << '\n';
  }
  std::cout << "\nselected " << param << " = " << r["selected"].get<double>() << '\n';
  if (r.contains("test")) {
    std::cout << "test MSE " << num(r["test"]["mse"]) << "  MAE " << num(r["test"]["mae"]) << '\n';
  }
}

void render_ranking(const json& r) {
  std::cout << "ranking by " << r["ranking"].get<std::string>() << "\n";
  for (const char* side : {"positive", "negative"}) {
    std::cout << '\n' << side << '\n';
    for (const auto& t : r[side]) {
      std::cout << "  " << std::left << std::setw(32) << t["term"].get<std::string>() << std::right
                << std::setw(14) << fixed(t["weight"].get<double>(), 6) << '\n';
    }
  }
}

// ---- predict input --------------------------------------------------------

struct TextRecord {
  std::string id;
  std::string text;
};

std::vector<TextRecord> read_texts(const std::string& path, std::string format) {
  if (format.empty()) {
    auto ends = [&](const std::string& suffix) {
      return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    format = ends(".csv") ? "csv" : (ends(".jsonl") || ends(".ndjson")) ? "jsonl" : "text";
  }
  std::vector<TextRecord> out;
  if (format == "text") {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
      file.open(path);
      if (!file) {
        std::cerr << "grind: cannot read '" << path << "'\n";
        throw CliFailure{GRIND_ERROR_DATA};
      }
      in = &file;
    }
    std::string line;
    std::size_t n = 0;
    while (std::getline(*in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      out.push_back({std::to_string(++n), line});
    }
    return out;
  }
  if (format != "csv" && format != "jsonl") usage_failure("unknown input format '" + format + "'");
  const auto corpus = load_corpus(path, format);
  const auto n = grind_corpus_size(corpus.get());
  for (std::size_t i = 0; i < n; ++i) {
    const char* id = nullptr;
    const char* text = nullptr;
    check(grind_corpus_record(corpus.get(), i, &id, &text, nullptr, nullptr));
    out.push_back({id, text});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grind: predict review scores from review text"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(grind_version()));

  std::string out_format = "json";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", out_format, "Report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
  };

  std::string input, input_format, stopwords_flag, model_name, orders = "1", out_path, model_file;
  std::optional<double> c_value;
  std::optional<std::int64_t> k_value;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  bool no_timestamp = false;
  std::size_t top_k = 50, examples = 0, explain_k = 20;
  std::string grid_text;
  std::int64_t kf = 5;
  bool clip = false, impact = false;

  auto add_input = [&](CLI::App* cmd) {
    cmd->add_option("--input,-i", input, "Review file (CSV with text,score columns or JSONL)")->required();
    cmd->add_option("--input-format", input_format, "csv or jsonl (default: from extension)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--stopwords", stopwords_flag,
                    "Stop-word file, one word per line (default: $GRIND_STOPWORDS, else bundled English list)");
  };

  auto* stats = app.add_subcommand(
      "stats",
      "Cleaning report, score summary and most frequent terms. Quartiles use linear interpolation "
      "between closest ranks: h = (n-1)q, s[floor h] + (h - floor h)(s[ceil h] - s[floor h]).");
  add_input(stats);
  stats->add_option("--top-k", top_k, "Terms per list")->capture_default_str();
  add_format(stats);

  auto* train = app.add_subcommand("train", "Train on a seeded split, report test MSE/MAE, save the model");
  add_input(train);
  train->add_option("--model,-m", model_name, "naive | ols-bow | ols-tfidf | ridge-tfidf | knn-tfidf")
      ->required();
  train->add_option("--orders", orders, "n-gram orders: 1 or 1,2")->capture_default_str();
  train->add_option("--C,-C", c_value, "Ridge parameter (penalty 1/(2C))");
  train->add_option("--k,-k", k_value, "Neighbours for knn-tfidf");
  train->add_option("--seed", seed, "Split seed")->capture_default_str();
  train->add_option("--test-fraction", test_fraction, "Held-out share")->capture_default_str();
  train->add_option("--out,-o", out_path, "Model file to write");
  train->add_flag("--no-timestamp", no_timestamp, "Omit the training timestamp from the model file");
  train->add_option("--examples", examples, "Include this many test predictions in the report");
  add_format(train);

  auto* tune = app.add_subcommand("tune", "k-fold cross-validated grid search on the training split");
  add_input(tune);
  tune->add_option("--model,-m", model_name, "ridge-tfidf | knn-tfidf")->required();
  tune->add_option("--orders", orders, "n-gram orders: 1 or 1,2")->capture_default_str();
  tune->add_option("--grid", grid_text,
                   "Comma-separated values (default C: 0.0001,0.001,0.01,0.1,1,10,20; "
                   "k: 1,11,21,51,101,201)");
  tune->add_option("--kf", kf, "Number of folds")->capture_default_str();
  tune->add_option("--seed", seed, "Split and fold seed")->capture_default_str();
  tune->add_option("--test-fraction", test_fraction, "Held-out share")->capture_default_str();
  tune->add_option("--out,-o", out_path, "Refit the selected value on the training split and save it");
  tune->add_flag("--no-timestamp", no_timestamp, "Omit the training timestamp from the model file");
  add_format(tune);

  auto* predict = app.add_subcommand("predict", "Predict scores; one JSON line per input text");
  predict->add_option("--model-file", model_file, "Model file")->required();
  predict->add_option("--input,-i", input, "Texts: plain text (one per line), CSV or JSONL; '-' for stdin")
      ->required();
  predict->add_option("--input-format", input_format, "text, csv or jsonl (default: from extension)")
      ->check(CLI::IsMember({"text", "csv", "jsonl"}));
  predict->add_flag("--clip", clip, "Clamp predictions to [0, 100] before rounding");
  add_format(predict);

  auto* explain = app.add_subcommand("explain", "Strongest positive and negative terms of a linear model");
  explain->add_option("--model-file", model_file, "Model file")->required();
  explain->add_option("--k,-k", explain_k, "Terms per side")->capture_default_str();
  explain->add_flag("--impact", impact,
                    "Extension: rank by weight times the mean training predictor instead of raw weight");
  add_format(explain);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : GRIND_ERROR_USAGE;
  }

  try {
    const bool text = out_format == "text";
    const auto stopwords = resolve_stopwords(stopwords_flag);

    if (*stats) {
      const auto corpus = load_corpus(input, input_format);
      grind_stats_options opts;
      grind_stats_options_init(&opts);
      opts.stopwords_path = c_str_or_null(stopwords);
      opts.top_k = top_k;
      char* out = nullptr;
      check(grind_stats(corpus.get(), &opts, &out));
      const auto doc = take_json(out);
      text ? render_stats(doc) : print_json(doc);
    } else if (*train) {
      const auto corpus = load_corpus(input, input_format);
      grind_train_options opts;
      grind_train_options_init(&opts);
      opts.model = model_name.c_str();
      opts.orders = orders.c_str();
      if (c_value) {
        opts.has_c = 1;
        opts.c = *c_value;
      }
      if (k_value) {
        opts.has_k = 1;
        opts.k = *k_value;
      }
      opts.seed = seed;
      opts.test_fraction = test_fraction;
      opts.stopwords_path = c_str_or_null(stopwords);
      opts.timestamp = no_timestamp ? 0 : 1;
      opts.examples = examples;
      grind_model* raw_model = nullptr;
      char* out = nullptr;
      check(grind_train(corpus.get(), &opts, &raw_model, &out));
      ModelPtr model(raw_model);
      const auto doc = take_json(out);
      if (!out_path.empty()) check(grind_model_save(model.get(), out_path.c_str()));
      text ? render_eval(doc) : print_json(doc);
    } else if (*tune) {
      const auto corpus = load_corpus(input, input_format);
      std::vector<double> grid;
      if (!grid_text.empty()) {
        std::stringstream ss(grid_text);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            while (used < item.size() && item[used] == ' ') ++used;
            if (used != item.size()) throw std::invalid_argument(item);
          } catch (const std::exception&) {
            usage_failure("invalid grid '" + grid_text + "': '" + item + "' is not a number");
          }
        }
        if (grid.empty()) usage_failure("invalid grid '" + grid_text + "'");
      }
      grind_tune_options opts;
      grind_tune_options_init(&opts);
      opts.model = model_name.c_str();
      opts.orders = orders.c_str();
      opts.grid = grid.data();
      opts.grid_size = grid.size();
      opts.kf = kf;
      opts.seed = seed;
      opts.test_fraction = test_fraction;
      opts.stopwords_path = c_str_or_null(stopwords);
      opts.timestamp = no_timestamp ? 0 : 1;
      grind_model* raw_model = nullptr;
      char* out = nullptr;
      check(grind_tune(corpus.get(), &opts, out_path.empty() ? nullptr : &raw_model, &out));
      ModelPtr model(raw_model);
      const auto doc = take_json(out);
      if (model) check(grind_model_save(model.get(), out_path.c_str()));
      text ? render_cv(doc) : print_json(doc);
    } else if (*predict) {
      const auto model = load_model(model_file);
      const auto texts = read_texts(input, input_format);
      for (const auto& rec : texts) {
        char* out = nullptr;
        check(grind_model_predict_json(model.get(), rec.id.c_str(), rec.text.c_str(), clip ? 1 : 0, &out));
        StringPtr line(out);
        if (text) {
          const auto doc = json::parse(line.get());
          std::cout << rec.id << '\t' << fixed(doc["pred"].get<double>()) << '\t'
                    << fixed(doc["pred_rounded"].get<double>(), 0) << '\n';
        } else {
          std::cout << line.get() << '\n';
        }
      }
    } else if (*explain) {
      const auto model = load_model(model_file);
      char* out = nullptr;
      check(grind_explain(model.get(), explain_k, impact ? 1 : 0, &out));
      const auto doc = take_json(out);
      text ? render_ranking(doc) : print_json(doc);
    }
  } catch (const CliFailure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "grind: " << e.what() << '\n';
    return GRIND_ERROR_INTERNAL;
  }
  std::cout.flush();
  return 0;
}
