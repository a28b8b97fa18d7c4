/*
 * grind: score regression from review text.
 *
 * Plain C interface to the grind library. Objects are opaque handles owned
 * by the caller and released with the matching *_free function. Every call
 * returns a grind_status; on failure grind_last_error() describes the
 * problem (the message is thread-local and valid until the next call on the
 * same thread). Strings returned through char** out-parameters are
 * heap-allocated and released with grind_string_free.
 */
#ifndef GRIND_GRIND_H
#define GRIND_GRIND_H

#include <stddef.h>
#include <stdint.h>

#if defined(GRIND_BUILDING_LIBRARY)
#define GRIND_API __attribute__((visibility("default")))
#else
#define GRIND_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Non-zero values match the CLI exit codes. */
typedef enum grind_status {
  GRIND_OK = 0,
  GRIND_ERROR_INTERNAL = 1,
  GRIND_ERROR_USAGE = 2,
  GRIND_ERROR_DATA = 3,
  GRIND_ERROR_NUMERIC = 4
} grind_status;

typedef struct grind_corpus grind_corpus;
typedef struct grind_model grind_model;

GRIND_API const char* grind_version(void);
GRIND_API const char* grind_last_error(void);
GRIND_API void grind_string_free(char* str);

/* ---- corpus ------------------------------------------------------------ */

/* format: "csv", "jsonl", or NULL to infer from the file extension. Records
 * are kept as read; cleaning happens inside the commands. */
GRIND_API grind_status grind_corpus_load(const char* path, const char* format,
                                         grind_corpus** out);
/* Parses in-memory CSV or JSONL content. */
GRIND_API grind_status grind_corpus_parse(const char* content, size_t length,
                                          const char* format, grind_corpus** out);
GRIND_API void grind_corpus_free(grind_corpus* corpus);
GRIND_API size_t grind_corpus_size(const grind_corpus* corpus);
/* Borrowed views into record `index`; any out-pointer may be NULL.
 * *has_score is 0 when the record had no score. */
GRIND_API grind_status grind_corpus_record(const grind_corpus* corpus, size_t index,
                                           const char** id, const char** text,
                                           double* score, int* has_score);

/* ---- commands ---------------------------------------------------------- */

typedef struct grind_stats_options {
  const char* stopwords_path; /* NULL: bundled English list */
  size_t top_k;               /* default 50 */
} grind_stats_options;

GRIND_API void grind_stats_options_init(grind_stats_options* options);
GRIND_API grind_status grind_stats(const grind_corpus* corpus,
                                   const grind_stats_options* options, char** out_json);

typedef struct grind_train_options {
  const char* model;          /* naive | ols-bow | ols-tfidf | ridge-tfidf | knn-tfidf */
  const char* orders;         /* "1" or "1,2" */
  int has_c;
  double c;                   /* ridge penalty parameter */
  int has_k;
  int64_t k;                  /* neighbours for knn */
  uint64_t seed;
  double test_fraction;       /* default 0.2 */
  const char* stopwords_path; /* NULL: bundled English list */
  int timestamp;              /* record a training timestamp in the model */
  size_t examples;            /* test rows to include as example predictions */
} grind_train_options;

GRIND_API void grind_train_options_init(grind_train_options* options);
/* out_model may be NULL when only the report is wanted. */
GRIND_API grind_status grind_train(const grind_corpus* corpus,
                                   const grind_train_options* options,
                                   grind_model** out_model, char** out_report_json);

typedef struct grind_tune_options {
  const char* model;          /* ridge-tfidf | knn-tfidf */
  const char* orders;
  const double* grid;         /* NULL or grid_size 0: default grid */
  size_t grid_size;
  int64_t kf;                 /* default 5 */
  uint64_t seed;
  double test_fraction;
  const char* stopwords_path;
  int timestamp;
} grind_tune_options;

GRIND_API void grind_tune_options_init(grind_tune_options* options);
/* When out_model is non-NULL the selected value is refit on the full
 * training split and its test metrics are added to the result. */
GRIND_API grind_status grind_tune(const grind_corpus* corpus, const grind_tune_options* options,
                                  grind_model** out_model, char** out_result_json);

/* ---- models ------------------------------------------------------------ */

GRIND_API grind_status grind_model_load(const char* path, grind_model** out);
GRIND_API grind_status grind_model_save(const grind_model* model, const char* path);
GRIND_API grind_status grind_model_to_json(const grind_model* model, char** out_json);
GRIND_API void grind_model_free(grind_model* model);
/* "naive", "ols", "ridge" or "knn". */
GRIND_API const char* grind_model_kind(const grind_model* model);

GRIND_API grind_status grind_model_predict(const grind_model* model, const char* text,
                                           double* out);
/* One JSON object {id, pred, pred_rounded}. */
GRIND_API grind_status grind_model_predict_json(const grind_model* model, const char* id,
                                                const char* text, int clip, char** out_json);
/* Strongest positive and negative terms. impact != 0 ranks by weight times
 * the training mean of the predictor. */
GRIND_API grind_status grind_explain(const grind_model* model, size_t k, int impact,
                                     char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* GRIND_GRIND_H */
