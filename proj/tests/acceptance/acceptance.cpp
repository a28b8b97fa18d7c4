// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"
#include "grind/commands.hpp"
#include "grind/evaluate.hpp"
#include "grind/model_file.hpp"
#include "grind/regress.hpp"

using namespace grind;
using namespace grind::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates the first few failure notes of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (++failures_ <= 3) notes_ << (failures_ > 1 ? "; " : "") << what;
  }
  void note(const std::string& s) { info_ = s; }
  Outcome outcome() const {
    if (pass_) return {true, info_};
    std::ostringstream s;
    s << notes_.str();
    if (failures_ > 3) s << " (+" << failures_ - 3 << " more)";
    return {false, s.str()};
  }

 private:
  bool pass_ = true;
  int failures_ = 0;
  std::ostringstream notes_;
  std::string info_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::size_t> iota_ids(std::size_t n) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

Eigen::VectorXd as_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Outcome ac1_tfidf_fixture() {
  Check c;
  const std::vector<Review> docs{{"0", "Sweet cocoa, sweet.", 90.0},
                                 {"1", "Cocoa and cedar.", 91.0},
                                 {"2", "Sweet, lean; lean cedar!", 88.0},
                                 {"3", "Floral.", 93.0}};
  const auto sw = StopwordSet::english();
  const auto tokenized = tokenize_reviews(docs, sw, {1});
  const auto recipe = fit_recipe(tokenized, FeatureSpace::tfidf, {1}, sw);
  const auto z = dense(transform(recipe, tokenized));
  // Columns: sweet, cocoa, cedar, lean, floral. N = 4; df = 2, 2, 2, 1, 1.
  const double common = std::log(4.0 / 3.0);
  const double rare = std::log(4.0 / 2.0);
  Eigen::MatrixXd want(4, 5);
  want << 2.0 / 3 * common, 1.0 / 3 * common, 0, 0, 0,
          0, 0.5 * common, 0.5 * common, 0, 0,
          0.25 * common, 0, 0.25 * common, 0.5 * rare, 0,
          0, 0, 0, 0, rare;
  c.expect(recipe.vocabulary.terms() == std::vector<std::string>{"sweet", "cocoa", "cedar", "lean", "floral"},
           "unexpected vocabulary order");
  if (z.rows() == 4 && z.cols() == 5) {
    const double err = (z - want).cwiseAbs().maxCoeff();
    c.expect(err <= 1e-9, "max |z - hand| = " + fmt(err));
    c.note("max |z - hand| = " + fmt(err));
  } else {
    c.expect(false, "matrix shape " + std::to_string(z.rows()) + "x" + std::to_string(z.cols()));
  }
  return c.outcome();
}

Outcome ac2_ridge_oracle() {
  Check c;
  std::mt19937_64 gen(20240001);
  double worst_rel = 0, worst_grad = 0;
  for (auto [p, m] : {std::pair{30, 10}, std::pair{10, 30}}) {
    for (double C : {0.01, 1.0, 100.0}) {
      for (int trial = 0; trial < 25; ++trial) {
        const Eigen::MatrixXd z = random_matrix(gen, p, m);
        const Eigen::VectorXd y = random_vector(gen, p);
        const auto fm = sparse(z);
        const auto yv = to_std(y);
        const auto fit = fit_ridge(fm, yv, C);
        const auto oracle = ridge_closed_form(z, y, C);
        const double rel = relative_error(as_eigen(fit.weights), oracle.weights);
        const double grad = objective_gradient_norm(fm, yv, fit.intercept, fit.weights, C);
        const double bound = 1e-8 * (1.0 + y.norm());
        worst_rel = std::max(worst_rel, rel);
        worst_grad = std::max(worst_grad, grad / bound);
        c.expect(rel <= 1e-6, "p=" + std::to_string(p) + " C=" + fmt(C) + " rel " + fmt(rel));
        c.expect(std::abs(fit.intercept - oracle.intercept) <= 1e-6 * std::max(1.0, std::abs(oracle.intercept)),
                 "intercept mismatch");
        c.expect(grad <= bound, "gradient " + fmt(grad) + " > " + fmt(bound));
      }
    }
  }
  c.note("150 fits, worst rel " + fmt(worst_rel) + ", worst grad/bound " + fmt(worst_grad));
  return c.outcome();
}

Outcome ac3_ols_limits() {
  Check c;
  std::mt19937_64 gen(20240003);
  double worst_limit = 0, worst_pinv = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd z = random_matrix(gen, 30, 10);
    const Eigen::VectorXd y = random_vector(gen, 30);
    const auto fm = sparse(z);
    const auto ridge = fit_ridge(fm, to_std(y), 1e12);
    const auto ols = fit_least_squares(fm, to_std(y));
    const double d = relative_error(as_eigen(ridge.weights), as_eigen(ols.weights));
    worst_limit = std::max(worst_limit, d);
    c.expect(d <= 1e-4 && std::abs(ridge.intercept - ols.intercept) <= 1e-4, "ridge(1e12) vs OLS " + fmt(d));
  }
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd z = random_matrix(gen, 10, 30);
    const Eigen::VectorXd y = random_vector(gen, 10);
    const auto ols = fit_least_squares(sparse(z), to_std(y));
    const auto oracle = pinv_least_squares(z, y);
    const double d = relative_error(as_eigen(ols.weights), oracle.weights);
    worst_pinv = std::max(worst_pinv, d);
    c.expect(d <= 1e-6 && std::abs(ols.intercept - oracle.intercept) <= 1e-6, "OLS vs pinv " + fmt(d));
  }
  c.note("ridge(1e12) vs OLS " + fmt(worst_limit) + ", min-norm vs pinv " + fmt(worst_pinv));
  return c.outcome();
}

Outcome ac4_knn_oracle() {
  Check c;
  std::mt19937_64 gen(20240004);
  std::uniform_int_distribution<int> level(-2, 2);
  std::uniform_int_distribution<int> half_points(0, 200);
  int ties = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 11 + static_cast<int>(gen() % 30);
    const int dim = 1 + static_cast<int>(gen() % 8);
    Eigen::MatrixXd train(rows, dim);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < dim; ++j) train(i, j) = 0.5 * level(gen);
    // Half-point scores keep every neighbour sum exact.
    std::vector<double> y;
    for (int i = 0; i < rows; ++i) y.push_back(0.5 * half_points(gen));
    Eigen::VectorXd query(dim);
    for (int j = 0; j < dim; ++j) query(j) = 0.5 * level(gen);
    const auto q = sparse(query.transpose()).rows[0];
    const auto fm = sparse(train);
    for (std::size_t k : {1u, 3u, 11u}) {
      const auto model = fit_knn(fm, y, static_cast<std::int64_t>(k));
      const auto [idx, mean] = knn_oracle(train, y, query, k);
      const auto got = knn_neighbors(model, q);
      c.expect(got == idx, "neighbour order differs (trial " + std::to_string(trial) + ", k=" + std::to_string(k) + ")");
      c.expect(predict_knn(model, q) == mean, "prediction differs (trial " + std::to_string(trial) + ")");
      std::vector<double> d;
      for (int i = 0; i < rows; ++i) d.push_back((train.row(i) - query.transpose()).norm());
      std::sort(d.begin(), d.end());
      if (k < d.size() && d[k - 1] == d[k]) ++ties;
    }
  }
  c.note("150 queries, " + std::to_string(ties) + " with a tie at the k-th neighbour");
  return c.outcome();
}

Outcome ac5_metrics() {
  Check c;
  std::mt19937_64 gen(20240005);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(gen);
      b[i] = u(gen);
    }
    long double sq = 0, ab = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sq += static_cast<long double>(a[i] - b[i]) * (a[i] - b[i]);
      ab += std::abs(a[i] - b[i]);
    }
    const double m = mse(a, b), e = mae(a, b);
    c.expect(std::abs(m - static_cast<double>(sq / n)) <= 1e-12 * std::max(1.0, m), "mse recompute");
    c.expect(std::abs(e - static_cast<double>(ab / n)) <= 1e-12 * std::max(1.0, e), "mae recompute");
    c.expect(e <= std::sqrt(m) * (1 + 1e-15), "mae > sqrt(mse)");
  }

  PlantedSpec spec;
  spec.n_reviews = 400;
  const auto reviews = planted_corpus(spec).reviews;
  TrainOptions options;
  options.seed = 5;
  options.timestamp = false;
  const auto report = cmd_train(reviews, options).report;
  const auto plan = split(iota_ids(reviews.size()), 0.2, 5);
  double mean = 0;
  for (auto i : plan.train_ids) mean += *reviews[i].score;
  mean /= static_cast<double>(plan.train_ids.size());
  double dev = 0;
  for (auto i : plan.test_ids) dev += (*reviews[i].score - mean) * (*reviews[i].score - mean);
  dev /= static_cast<double>(plan.test_ids.size());
  const double diff = std::abs(report["mse"].get<double>() - dev);
  c.expect(diff <= 1e-12, "naive MSE off by " + fmt(diff));
  c.note("100 vector pairs; naive MSE diff " + fmt(diff));
  return c.outcome();
}

bool same_cv(const CvResult& a, const CvResult& b) {
  if (a.family != b.family || a.selected != b.selected || a.points.size() != b.points.size()) return false;
  for (std::size_t g = 0; g < a.points.size(); ++g) {
    const auto& p = a.points[g];
    const auto& q = b.points[g];
    if (p.value != q.value || p.fold_mse != q.fold_mse || p.mean_mse != q.mean_mse || p.std_mse != q.std_mse) return false;
  }
  return true;
}

Outcome ac6_cv_hygiene() {
  Check c;
  PlantedSpec spec;
  auto corpus = planted_corpus(spec);
  const auto plan = split(iota_ids(corpus.reviews.size()), 0.2, 6);
  const auto folds = kfold(plan.train_ids, 5, 6);
  std::vector<std::size_t> all;
  std::size_t lo = SIZE_MAX, hi = 0;
  for (const auto& f : folds.folds) {
    all.insert(all.end(), f.begin(), f.end());
    lo = std::min(lo, f.size());
    hi = std::max(hi, f.size());
  }
  std::sort(all.begin(), all.end());
  auto train_sorted = plan.train_ids;
  std::sort(train_sorted.begin(), train_sorted.end());
  c.expect(folds.folds.size() == 5, "fold count");
  c.expect(all == train_sorted, "folds do not partition the training ids");
  c.expect(hi - lo <= 1, "fold sizes differ by " + std::to_string(hi - lo));

  const auto sw = StopwordSet::english();
  const std::vector<double> ridge_grid{0.01, 1, 20};
  const std::vector<double> knn_grid{1, 11, 51};
  const auto r0 = grid_search(ModelFamily::ridge_tfidf, ridge_grid, folds, corpus.reviews, {1, 2}, sw);
  const auto k0 = grid_search(ModelFamily::knn_tfidf, knn_grid, folds, corpus.reviews, {1}, sw);
  for (auto i : plan.test_ids) {
    corpus.reviews[i].text = "unrelated replacement words number " + std::to_string(i) + " plantaa plantab";
    corpus.reviews[i].score = 12.5;
  }
  const auto r1 = grid_search(ModelFamily::ridge_tfidf, ridge_grid, folds, corpus.reviews, {1, 2}, sw);
  const auto k1 = grid_search(ModelFamily::knn_tfidf, knn_grid, folds, corpus.reviews, {1}, sw);
  c.expect(same_cv(r0, r1), "ridge CvResult changed after test-set mutation");
  c.expect(same_cv(k0, k1), "knn CvResult changed after test-set mutation");
  c.note("fold sizes " + std::to_string(lo) + ".." + std::to_string(hi) + "; ridge and knn results unchanged");
  return c.outcome();
}

Outcome ac7_end_to_end() {
  Check c;
  // Short reviews (three planted terms and one filler word). With TF as a
  // per-document share, feature values shrink with document length, and at
  // the largest grid C longer reviews leave the ridge weights over-shrunk.
  PlantedSpec spec;
  spec.filler_per_review = 1;
  const auto reviews = planted_corpus(spec).reviews;
  const std::uint64_t seed = 7;
  auto train_mse = [&](const std::string& model) {
    TrainOptions o;
    o.model = model;
    o.seed = seed;
    o.timestamp = false;
    return cmd_train(reviews, o).report["mse"].get<double>();
  };
  auto tuned_mse = [&](const std::string& model, double& selected) {
    TuneOptions o;
    o.model = model;
    o.seed = seed;
    o.timestamp = false;
    o.retrain = true;
    const auto out = cmd_tune(reviews, o);
    selected = out.result["selected"].get<double>();
    return out.result["test"]["mse"].get<double>();
  };
  const double naive = train_mse("naive");
  const double ols_bow = train_mse("ols-bow");
  const double ols_tfidf = train_mse("ols-tfidf");
  double c_sel = 0, k_sel = 0;
  const double ridge = tuned_mse("ridge-tfidf", c_sel);
  const double knn = tuned_mse("knn-tfidf", k_sel);
  c.expect(ridge <= 0.5 * naive, "ridge " + fmt(ridge) + " > 0.5 x naive " + fmt(naive));
  c.expect(ols_bow < naive, "ols-bow " + fmt(ols_bow) + " does not beat naive " + fmt(naive));
  c.expect(ols_tfidf < naive, "ols-tfidf " + fmt(ols_tfidf) + " does not beat naive " + fmt(naive));
  c.expect(knn < naive, "knn " + fmt(knn) + " does not beat naive " + fmt(naive));
  c.note("test MSE naive " + fmt(naive) + ", ols-bow " + fmt(ols_bow) + ", ols-tfidf " + fmt(ols_tfidf) +
         ", ridge(C=" + fmt(c_sel) + ") " + fmt(ridge) + ", knn(k=" + fmt(k_sel) + ") " + fmt(knn));
  return c.outcome();
}

Outcome ac8_determinism() {
  Check c;
  PlantedSpec spec;
  // Large enough that every default K-NN grid value fits inside a fold.
  spec.n_reviews = 400;
  const auto reviews = planted_corpus(spec).reviews;
  for (const char* model : {"naive", "ols-bow", "ols-tfidf", "ridge-tfidf", "knn-tfidf"}) {
    TrainOptions o;
    o.model = model;
    o.orders = {1, 2};
    o.C = 1.0;
    o.k = 11;
    o.seed = 8;
    o.timestamp = false;
    o.examples = 5;
    const auto a = cmd_train(reviews, o);
    const auto b = cmd_train(reviews, o);
    c.expect(a.report.dump() == b.report.dump(), std::string(model) + " report differs");
    c.expect(to_json(a.model).dump() == to_json(b.model).dump(), std::string(model) + " model differs");
  }
  for (const char* model : {"ridge-tfidf", "knn-tfidf"}) {
    TuneOptions o;
    o.model = model;
    o.seed = 8;
    o.timestamp = false;
    o.retrain = true;
    const auto a = cmd_tune(reviews, o);
    const auto b = cmd_tune(reviews, o);
    c.expect(a.result.dump() == b.result.dump(), std::string(model) + " tune result differs");
    c.expect(to_json(*a.model).dump() == to_json(*b.model).dump(), std::string(model) + " tuned model differs");
  }
  c.note("5 train and 2 tune configurations byte-identical");
  return c.outcome();
}

Outcome ac9_round_trip() {
  Check c;
  PlantedSpec spec;
  spec.n_reviews = 300;
  const auto reviews = planted_corpus(spec).reviews;
  PlantedSpec other;
  other.n_reviews = 94;
  other.seed = 4242;
  std::vector<std::string> texts;
  for (const auto& r : planted_corpus(other).reviews) texts.push_back(r.text);
  for (const char* t : {"", "   ", "Unseen words only.", "plantaa plantaa plantaa", "Ça, café crème!", "the and of"}) {
    texts.push_back(t);
  }
  const auto dir = std::filesystem::temp_directory_path();
  int compared = 0;
  for (const char* model : {"naive", "ols-bow", "ols-tfidf", "ridge-tfidf", "knn-tfidf"}) {
    TrainOptions o;
    o.model = model;
    o.orders = {1, 2};
    o.C = 0.5;
    o.k = 7;
    o.seed = 9;
    const auto trained = cmd_train(reviews, o).model;
    const auto path = (dir / ("grind_acceptance_" + std::string(model) + ".json")).string();
    save_model(trained, path);
    const auto loaded = load_model(path);
    std::filesystem::remove(path);
    for (const auto& t : texts) {
      const double a = trained.predict(t);
      const double b = loaded.predict(t);
      ++compared;
      c.expect(std::memcmp(&a, &b, sizeof a) == 0, std::string(model) + " differs on '" + t + "'");
    }
  }
  c.note(std::to_string(texts.size()) + " texts x 5 models, " + std::to_string(compared) + " predictions bit-identical");
  return c.outcome();
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    const char* title;
    double limit_seconds;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "TF-IDF hand fixture", 1.0, ac1_tfidf_fixture},
      {"AC2", "ridge vs closed form", 5.0, ac2_ridge_oracle},
      {"AC3", "least-squares limits", 0.0, ac3_ols_limits},
      {"AC4", "K-NN vs exhaustive oracle", 2.0, ac4_knn_oracle},
      {"AC5", "metric identities", 0.0, ac5_metrics},
      {"AC6", "cross-validation hygiene", 0.0, ac6_cv_hygiene},
      {"AC7", "end-to-end model ordering", 60.0, ac7_end_to_end},
      {"AC8", "determinism", 0.0, ac8_determinism},
      {"AC9", "persistence round trip", 0.0, ac9_round_trip},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.limit_seconds > 0 && secs >= cr.limit_seconds) {
      out.pass = false;
      out.detail += (out.detail.empty() ? "" : "; ") + std::string("runtime ") + fmt(secs) + " s over " +
                    fmt(cr.limit_seconds) + " s";
    }
    if (!out.pass) ++failed;
    std::printf("[%s] %s %s (%.3f s): %s\n", out.pass ? "PASS" : "FAIL", cr.name, cr.title, secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
