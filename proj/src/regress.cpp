#include "grind/regress.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "grind/error.hpp"

namespace grind {

namespace {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseRows to_eigen(const FeatureMatrix& features) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < features.rows.size(); ++i) {
    for (const auto& e : features.rows[i].entries) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(e.index), e.value);
    }
  }
  SparseRows z(static_cast<Eigen::Index>(features.rows.size()), static_cast<Eigen::Index>(features.dim));
  z.setFromTriplets(triplets.begin(), triplets.end());
  return z;
}

void check_shapes(const FeatureMatrix& features, std::span<const double> y) {
  if (features.rows.empty()) throw UsageError("cannot fit on zero training rows");
  if (features.rows.size() != y.size()) {
    throw UsageError("feature matrix has " + std::to_string(features.rows.size()) + " rows but " +
                     std::to_string(y.size()) + " targets were given");
  }
  for (const auto& row : features.rows) {
    if (row.dim != features.dim) throw UsageError("feature rows have inconsistent dimensions");
  }
}

constexpr int kMaxRefinements = 6;

}  // namespace

struct RidgeSolver::Impl {
  SparseRows z;
  Eigen::VectorXd y;
  Eigen::VectorXd y_centered;
  Eigen::VectorXd means;
  double y_mean = 0.0;
  bool dual = false;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double cutoff = 0.0;
  double tolerance = 0.0;

  Eigen::Index p() const { return z.rows(); }
  Eigen::Index m() const { return z.cols(); }

  // Zc v with Zc = Z - 1 means^T.
  Eigen::VectorXd centered_times(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = z * v;
    out.array() -= means.dot(v);
    return out;
  }

  // Zc^T u.
  Eigen::VectorXd centered_transpose_times(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out = z.transpose() * u;
    out -= means * u.sum();
    return out;
  }

  double objective_gradient_norm(double intercept, const Eigen::VectorXd& beta,
                                 std::optional<double> C) const {
    const double scale = 2.0 / static_cast<double>(p());
    const Eigen::VectorXd residual = (z * beta).array() + intercept - y.array();
    Eigen::VectorXd g = scale * (z.transpose() * residual);
    if (C) g += beta / *C;
    const double g0 = scale * residual.sum();
    return std::sqrt(g0 * g0 + g.squaredNorm());
  }

  // Applies (G + lambda I)^+ through the eigendecomposition; components whose
  // eigenvalue is numerically zero are dropped.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& rhs, double lambda) const {
    Eigen::VectorXd coeffs = eigenvectors.transpose() * rhs;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      const double e = eigenvalues[i];
      coeffs[i] = e <= cutoff ? 0.0 : coeffs[i] / (e + lambda);
    }
    return eigenvectors * coeffs;
  }
};

RidgeSolver::RidgeSolver(const FeatureMatrix& features, std::span<const double> targets)
    : impl_(std::make_unique<Impl>()) {
  check_shapes(features, targets);
  auto& s = *impl_;
  s.z = to_eigen(features);
  s.y = Eigen::Map<const Eigen::VectorXd>(targets.data(), static_cast<Eigen::Index>(targets.size()));
  const auto p = static_cast<double>(s.p());
  s.y_mean = s.y.mean();
  s.y_centered = s.y.array() - s.y_mean;
  s.means = (s.z.transpose() * Eigen::VectorXd::Ones(s.p())) / p;
  s.tolerance = gradient_tolerance(targets);
  s.dual = s.m() > s.p();

  if (s.m() == 0) return;

  Eigen::MatrixXd gram;
  if (s.dual) {
    // Kc = C K C with K = Z Z^T and C the centering projector.
    SparseRows k = s.z * SparseRows(s.z.transpose());
    gram = Eigen::MatrixXd(k);
    const Eigen::VectorXd row_means = gram.rowwise().mean();
    const double grand = row_means.mean();
    gram.colwise() -= row_means;
    gram.rowwise() -= row_means.transpose();
    gram.array() += grand;
  } else {
    // Zc^T Zc = Z^T Z - p means means^T.
    Eigen::SparseMatrix<double> zt_z = Eigen::SparseMatrix<double>(s.z.transpose()) * s.z;
    gram = Eigen::MatrixXd(zt_z);
    gram.noalias() -= p * s.means * s.means.transpose();
  }
  gram = 0.5 * (gram + gram.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of the Gram matrix failed");
  s.eigenvalues = eig.eigenvalues();
  s.eigenvectors = eig.eigenvectors();
  const double largest = std::max(0.0, s.eigenvalues.cwiseAbs().maxCoeff());
  s.cutoff = static_cast<double>(gram.rows()) * std::numeric_limits<double>::epsilon() * largest;
}

RidgeSolver::~RidgeSolver() = default;
RidgeSolver::RidgeSolver(RidgeSolver&&) noexcept = default;
RidgeSolver& RidgeSolver::operator=(RidgeSolver&&) noexcept = default;

bool RidgeSolver::dual() const noexcept { return impl_->dual; }

LinearFit RidgeSolver::ridge(double C) const {
  if (!(C > 0.0) || !std::isfinite(C)) {
    std::ostringstream os;
    os << "ridge parameter C must be positive and finite, got " << C;
    throw UsageError(os.str());
  }
  return solve(static_cast<double>(impl_->p()) / (2.0 * C), C);
}

LinearFit RidgeSolver::least_squares() const { return solve(0.0, std::nullopt); }

LinearFit RidgeSolver::solve(double lambda, std::optional<double> C) const {
  const auto& s = *impl_;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(s.m());

  if (s.m() > 0) {
    // Gradient of (1/2)||Zc b - yc||^2 + (lambda/2)||b||^2, i.e. p/2 times
    // the gradient of the training objective with respect to b.
    auto scaled_gradient = [&](const Eigen::VectorXd& b) {
      Eigen::VectorXd g = s.centered_transpose_times(s.centered_times(b) - s.y_centered);
      g += lambda * b;
      return g;
    };

    if (s.dual) {
      Eigen::VectorXd a = s.apply_inverse(s.y_centered, lambda);
      beta = s.centered_transpose_times(a);
      double best = scaled_gradient(beta).norm();
      for (int it = 0; it < kMaxRefinements; ++it) {
        const Eigen::VectorXd residual = s.centered_times(beta) + lambda * a - s.y_centered;
        const Eigen::VectorXd a_next = a - s.apply_inverse(residual, lambda);
        const Eigen::VectorXd beta_next = s.centered_transpose_times(a_next);
        const double g = scaled_gradient(beta_next).norm();
        if (!(g < best)) break;
        a = a_next;
        beta = beta_next;
        best = g;
      }
    } else {
      beta = s.apply_inverse(s.centered_transpose_times(s.y_centered), lambda);
      Eigen::VectorXd g = scaled_gradient(beta);
      double best = g.norm();
      for (int it = 0; it < kMaxRefinements; ++it) {
        const Eigen::VectorXd beta_next = beta - s.apply_inverse(g, lambda);
        const Eigen::VectorXd g_next = scaled_gradient(beta_next);
        const double n = g_next.norm();
        if (!(n < best)) break;
        beta = beta_next;
        g = g_next;
        best = n;
      }
    }
  }

  LinearFit fit;
  fit.weights.assign(beta.data(), beta.data() + beta.size());
  fit.column_means.assign(s.means.data(), s.means.data() + s.means.size());
  fit.intercept = s.y_mean - s.means.dot(beta);
  fit.gradient_norm = s.objective_gradient_norm(fit.intercept, beta, C);
  if (!(fit.gradient_norm <= s.tolerance)) {
    std::ostringstream os;
    os << (C ? "ridge" : "least-squares") << " solver did not converge: gradient norm "
       << fit.gradient_norm << " exceeds " << s.tolerance;
    throw NumericError(os.str());
  }
  return fit;
}

LinearFit fit_least_squares(const FeatureMatrix& features, std::span<const double> y) {
  return RidgeSolver(features, y).least_squares();
}

LinearFit fit_ridge(const FeatureMatrix& features, std::span<const double> y, double C) {
  if (!(C > 0.0) || !std::isfinite(C)) {
    std::ostringstream os;
    os << "ridge parameter C must be positive and finite, got " << C;
    throw UsageError(os.str());
  }
  return RidgeSolver(features, y).ridge(C);
}

double objective_gradient_norm(const FeatureMatrix& features, std::span<const double> y,
                               double intercept, std::span<const double> weights,
                               std::optional<double> C) {
  check_shapes(features, y);
  if (weights.size() != features.dim) throw UsageError("weight vector length does not match features");
  const auto p = static_cast<double>(features.rows.size());
  double d_intercept = 0.0;
  std::vector<double> d_weights(weights.size(), 0.0);
  for (std::size_t i = 0; i < features.rows.size(); ++i) {
    const double r = intercept + features.rows[i].dot(weights) - y[i];
    d_intercept += r;
    for (const auto& e : features.rows[i].entries) d_weights[e.index] += r * e.value;
  }
  double total = (2.0 / p * d_intercept) * (2.0 / p * d_intercept);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    double g = 2.0 / p * d_weights[j];
    if (C) g += weights[j] / *C;
    total += g * g;
  }
  return std::sqrt(total);
}

double gradient_tolerance(std::span<const double> y) {
  double sq = 0.0;
  for (double v : y) sq += v * v;
  return 1e-8 * (1.0 + std::sqrt(sq));
}

double predict_linear(const LinearFit& fit, const SparseVector& features) {
  if (features.dim != fit.weights.size()) {
    throw UsageError("feature vector dimension does not match the model");
  }
  return fit.intercept + features.dot(fit.weights);
}

double predict_linear(const LinearModel& model, std::string_view text) {
  return predict_linear(model.fit, model.recipe.featurize(text));
}

NaiveModel fit_naive(std::span<const double> y) {
  if (y.empty()) throw UsageError("cannot fit the naive model on zero scores");
  double total = 0.0;
  for (double v : y) total += v;
  return {total / static_cast<double>(y.size())};
}

KnnModel fit_knn(FeatureMatrix train, std::vector<double> scores, std::int64_t k) {
  if (train.rows.size() != scores.size()) {
    throw UsageError("K-NN training matrix has " + std::to_string(train.rows.size()) + " rows but " +
                     std::to_string(scores.size()) + " scores");
  }
  if (k < 1 || static_cast<std::uint64_t>(k) > train.rows.size()) {
    throw UsageError("k = " + std::to_string(k) + " is outside [1, " +
                     std::to_string(train.rows.size()) + "]");
  }
  return {std::move(train), std::move(scores), static_cast<std::size_t>(k)};
}

double euclidean_distance(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) throw UsageError("cannot compare vectors of different dimensions");
  double total = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    double d = 0.0;
    if (ib == b.entries.end() || (ia != a.entries.end() && ia->index < ib->index)) {
      d = ia->value;
      ++ia;
    } else if (ia == a.entries.end() || ib->index < ia->index) {
      d = -ib->value;
      ++ib;
    } else {
      d = ia->value - ib->value;
      ++ia;
      ++ib;
    }
    total += d * d;
  }
  return std::sqrt(total);
}

std::vector<std::size_t> knn_neighbors(const KnnModel& model, const SparseVector& query) {
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(model.train.rows.size());
  for (std::size_t i = 0; i < model.train.rows.size(); ++i) {
    ranked.emplace_back(euclidean_distance(model.train.rows[i], query), i);
  }
  const auto k = std::min(model.k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].second);
  return out;
}

double neighbor_mean(std::span<const double> scores, std::span<const std::size_t> neighbors) {
  if (neighbors.empty()) throw UsageError("no neighbours to average");
  double total = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto i : neighbors) {
    const double y = scores[i];
    total += y;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  // Rounding in the sum can push the mean a hair outside the neighbours' range.
  return std::clamp(total / static_cast<double>(neighbors.size()), lo, hi);
}

double predict_knn(const KnnModel& model, const SparseVector& query) {
  return neighbor_mean(model.scores, knn_neighbors(model, query));
}

}  // namespace grind
