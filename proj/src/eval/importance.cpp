#include "toxblend/eval/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "toxblend/blend/member.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::eval {

Vector abs_correlation(const Matrix& x, int f) {
  if (f < 0 || f >= x.cols()) throw DataError("feature index out of range");
  if (x.rows() < 2) throw DataError("correlation needs at least two rows");
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  const Vector ss = centred.colwise().squaredNorm().transpose();
  const Vector cov = centred.transpose() * centred.col(f);
  Vector out(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double d = std::sqrt(ss(j) * ss(f));
    out(j) = d > 0.0 ? std::abs(cov(j)) / d : 0.0;
  }
  return out;
}

std::vector<int> correlated_group(const Matrix& train, int f, int k) {
  if (k < 0) throw ConfigError("k must be non-negative");
  if (k >= train.cols()) throw ConfigError("k must be smaller than the feature count");
  if (k == 0) return {};
  const Vector c = abs_correlation(train, f);
  std::vector<int> others;
  for (int j = 0; j < train.cols(); ++j) {
    if (j != f && c(j) > 0.0) others.push_back(j);
  }
  std::stable_sort(others.begin(), others.end(), [&](int a, int b) { return c(a) > c(b); });
  if (others.size() > static_cast<std::size_t>(k)) others.resize(static_cast<std::size_t>(k));
  return others;
}

namespace {

std::vector<std::vector<int>> fold_permutations(int n, int folds, std::uint64_t seed) {
  std::vector<std::vector<int>> out;
  for (int j = 0; j < folds; ++j) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    rng.shuffle(std::span<int>(p));
    out.push_back(std::move(p));
  }
  return out;
}

double baseline_auc(const ScoreFn& model, const Matrix& x, const LabelMatrix& y) {
  const double b = blend::mean_target_auc(y, model(x));
  if (std::isnan(b)) throw DataError("no target has a defined test AUC");
  return b;
}

Importance measure(const ScoreFn& model, const Matrix& x_test, const LabelMatrix& y_test, const Matrix& x_train, int f,
                   int k, const std::vector<std::vector<int>>& perms, double baseline) {
  Importance imp;
  imp.feature = f;
  imp.group = correlated_group(x_train, f, k);
  imp.baseline = baseline;
  std::vector<int> cols{f};
  cols.insert(cols.end(), imp.group.begin(), imp.group.end());
  Matrix shuffled = x_test;
  for (const auto& p : perms) {
    for (int c : cols) {
      for (Eigen::Index i = 0; i < x_test.rows(); ++i) shuffled(i, c) = x_test(p[static_cast<std::size_t>(i)], c);
    }
    const double s = blend::mean_target_auc(y_test, model(shuffled));
    imp.per_fold.push_back(baseline - s);  // labels unchanged, so s is defined
  }
  imp.degradation = std::accumulate(imp.per_fold.begin(), imp.per_fold.end(), 0.0) / static_cast<double>(perms.size());
  return imp;
}

void check_inputs(const Matrix& x_test, const LabelMatrix& y_test, const Matrix& x_train, int folds) {
  if (folds < 1) throw ConfigError("folds must be at least 1");
  if (x_test.rows() != y_test.rows()) throw DataError("test features and labels differ in rows");
  if (x_test.cols() != x_train.cols()) throw DataError("train and test feature widths differ");
}

}  // namespace

Importance permutation_importance(const ScoreFn& model, const Matrix& x_test, const LabelMatrix& y_test,
                                  const Matrix& x_train, int f, int k, int folds, std::uint64_t seed) {
  check_inputs(x_test, y_test, x_train, folds);
  if (f < 0 || f >= x_test.cols()) throw DataError("feature index out of range");
  const auto perms = fold_permutations(static_cast<int>(x_test.rows()), folds, seed);
  return measure(model, x_test, y_test, x_train, f, k, perms, baseline_auc(model, x_test, y_test));
}

std::vector<Importance> importance_table(const ScoreFn& model, const Matrix& x_test, const LabelMatrix& y_test,
                                         const Matrix& x_train, int k, int folds, std::uint64_t seed,
                                         const std::vector<int>& features) {
  check_inputs(x_test, y_test, x_train, folds);
  std::vector<int> list = features;
  if (list.empty()) {
    for (int j = 0; j < x_test.cols(); ++j) list.push_back(j);
  }
  const auto perms = fold_permutations(static_cast<int>(x_test.rows()), folds, seed);
  const double base = baseline_auc(model, x_test, y_test);
  std::vector<Importance> out;
  for (int f : list) {
    if (f < 0 || f >= x_test.cols()) throw DataError("feature index out of range");
    out.push_back(measure(model, x_test, y_test, x_train, f, k, perms, base));
  }
  return out;
}

int rank_in_fold(const std::vector<Importance>& table, int feature, int fold) {
  const Importance* self = nullptr;
  for (const auto& i : table) {
    if (i.feature == feature) self = &i;
  }
  if (self == nullptr) throw DataError("feature not in importance table");
  const double d = self->per_fold.at(static_cast<std::size_t>(fold));
  int rank = 0;
  for (const auto& i : table) {
    const double o = i.per_fold.at(static_cast<std::size_t>(fold));
    if (o > d || (o == d && i.feature < feature)) ++rank;
  }
  return rank;
}

}  // namespace toxblend::eval
