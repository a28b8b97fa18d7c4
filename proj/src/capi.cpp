#include "grind/grind.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "grind/commands.hpp"
#include "grind/error.hpp"

struct grind_corpus {
  std::vector<grind::Review> reviews;
};

struct grind_model {
  grind::TrainedModel model;
};

namespace {

thread_local std::string last_error;

template <typename Body>
grind_status guarded(Body&& body) {
  try {
    body();
    last_error.clear();
    return GRIND_OK;
  } catch (const grind::Error& e) {
    last_error = e.what();
    return static_cast<grind_status>(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return GRIND_ERROR_INTERNAL;
}

void require(const void* ptr, const char* name) {
  if (!ptr) throw grind::UsageError(std::string(name) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

char* dump(const nlohmann::json& doc) { return dup_string(doc.dump(2)); }

grind::StopwordSet stopwords_from(const char* path) {
  return path ? grind::StopwordSet::from_file(path) : grind::StopwordSet::english();
}

}  // namespace

extern "C" {

const char* grind_version(void) { return "1.0.0"; }

const char* grind_last_error(void) { return last_error.c_str(); }

void grind_string_free(char* str) { std::free(str); }

grind_status grind_corpus_load(const char* path, const char* format, grind_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    const auto fmt = format ? grind::parse_input_format(format) : grind::infer_input_format(path);
    auto corpus = std::make_unique<grind_corpus>();
    corpus->reviews = grind::load_reviews(path, fmt);
    *out = corpus.release();
  });
}

grind_status grind_corpus_parse(const char* content, size_t length, const char* format,
                                grind_corpus** out) {
  return guarded([&] {
    require(content, "content");
    require(format, "format");
    require(out, "out");
    *out = nullptr;
    const std::string_view text(content, length);
    auto corpus = std::make_unique<grind_corpus>();
    corpus->reviews = grind::parse_input_format(format) == grind::InputFormat::csv
                          ? grind::parse_csv(text)
                          : grind::parse_jsonl(text);
    *out = corpus.release();
  });
}

void grind_corpus_free(grind_corpus* corpus) { delete corpus; }

size_t grind_corpus_size(const grind_corpus* corpus) { return corpus ? corpus->reviews.size() : 0; }

grind_status grind_corpus_record(const grind_corpus* corpus, size_t index, const char** id,
                                 const char** text, double* score, int* has_score) {
  return guarded([&] {
    require(corpus, "corpus");
    if (index >= corpus->reviews.size()) throw grind::UsageError("record index out of range");
    const auto& r = corpus->reviews[index];
    if (id) *id = r.id.c_str();
    if (text) *text = r.text.c_str();
    if (score) *score = r.score.value_or(0.0);
    if (has_score) *has_score = r.score.has_value() ? 1 : 0;
  });
}

void grind_stats_options_init(grind_stats_options* options) {
  if (!options) return;
  options->stopwords_path = nullptr;
  options->top_k = 50;
}

grind_status grind_stats(const grind_corpus* corpus, const grind_stats_options* options,
                         char** out_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out_json, "out_json");
    *out_json = nullptr;
    grind_stats_options defaults;
    grind_stats_options_init(&defaults);
    const auto& o = options ? *options : defaults;
    grind::StatsOptions opts;
    opts.stopwords = stopwords_from(o.stopwords_path);
    opts.top_k = o.top_k;
    *out_json = dump(grind::cmd_stats(corpus->reviews, opts));
  });
}

void grind_train_options_init(grind_train_options* options) {
  if (!options) return;
  *options = grind_train_options{};
  options->model = "naive";
  options->orders = "1";
  options->test_fraction = 0.2;
  options->timestamp = 1;
}

grind_status grind_train(const grind_corpus* corpus, const grind_train_options* options,
                         grind_model** out_model, char** out_report_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(options, "options");
    require(out_report_json, "out_report_json");
    *out_report_json = nullptr;
    if (out_model) *out_model = nullptr;
    grind::TrainOptions opts;
    opts.model = options->model ? options->model : "naive";
    opts.orders = grind::parse_orders(options->orders ? options->orders : "1");
    if (options->has_c) opts.C = options->c;
    if (options->has_k) opts.k = options->k;
    opts.seed = options->seed;
    opts.test_fraction = options->test_fraction;
    opts.stopwords = stopwords_from(options->stopwords_path);
    opts.timestamp = options->timestamp != 0;
    opts.examples = options->examples;
    auto outcome = grind::cmd_train(corpus->reviews, opts);
    auto report = dump(outcome.report);
    if (out_model) *out_model = new grind_model{std::move(outcome.model)};
    *out_report_json = report;
  });
}

void grind_tune_options_init(grind_tune_options* options) {
  if (!options) return;
  *options = grind_tune_options{};
  options->model = "ridge-tfidf";
  options->orders = "1";
  options->kf = 5;
  options->test_fraction = 0.2;
  options->timestamp = 1;
}

grind_status grind_tune(const grind_corpus* corpus, const grind_tune_options* options,
                        grind_model** out_model, char** out_result_json) {
  return guarded([&] {
    require(corpus, "corpus");
    require(options, "options");
    require(out_result_json, "out_result_json");
    *out_result_json = nullptr;
    if (out_model) *out_model = nullptr;
    grind::TuneOptions opts;
    opts.model = options->model ? options->model : "ridge-tfidf";
    opts.orders = grind::parse_orders(options->orders ? options->orders : "1");
    if (options->grid && options->grid_size > 0) {
      opts.grid.assign(options->grid, options->grid + options->grid_size);
    }
    opts.kf = options->kf;
    opts.seed = options->seed;
    opts.test_fraction = options->test_fraction;
    opts.stopwords = stopwords_from(options->stopwords_path);
    opts.timestamp = options->timestamp != 0;
    opts.retrain = out_model != nullptr;
    auto outcome = grind::cmd_tune(corpus->reviews, opts);
    auto result = dump(outcome.result);
    if (out_model && outcome.model) *out_model = new grind_model{std::move(*outcome.model)};
    *out_result_json = result;
  });
}

grind_status grind_model_load(const char* path, grind_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new grind_model{grind::load_model(path)};
  });
}

grind_status grind_model_save(const grind_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    grind::save_model(model->model, path);
  });
}

grind_status grind_model_to_json(const grind_model* model, char** out_json) {
  return guarded([&] {
    require(model, "model");
    require(out_json, "out_json");
    *out_json = dup_string(grind::to_json(model->model).dump(1));
  });
}

void grind_model_free(grind_model* model) { delete model; }

const char* grind_model_kind(const grind_model* model) {
  if (!model) return nullptr;
  return grind::to_string(model->model.kind).data();
}

grind_status grind_model_predict(const grind_model* model, const char* text, double* out) {
  return guarded([&] {
    require(model, "model");
    require(text, "text");
    require(out, "out");
    *out = model->model.predict(text);
  });
}

grind_status grind_model_predict_json(const grind_model* model, const char* id, const char* text,
                                      int clip, char** out_json) {
  return guarded([&] {
    require(model, "model");
    require(text, "text");
    require(out_json, "out_json");
    *out_json = dup_string(grind::cmd_predict_one(model->model, id ? id : "", text, clip != 0).dump());
  });
}

grind_status grind_explain(const grind_model* model, size_t k, int impact, char** out_json) {
  return guarded([&] {
    require(model, "model");
    require(out_json, "out_json");
    *out_json = nullptr;
    *out_json = dump(grind::cmd_explain(model->model, k, impact != 0));
  });
}

}  // extern "C"
