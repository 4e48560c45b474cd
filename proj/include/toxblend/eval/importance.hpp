#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "toxblend/common.hpp"

namespace toxblend::eval {

/// Molecules x features -> molecules x targets probabilities.
using ScoreFn = std::function<Matrix(const Matrix&)>;

/// Absolute Pearson correlation of every column with column f; constant
/// columns correlate 0.
Vector abs_correlation(const Matrix& x, int f);

/// The k columns other than f most correlated with f (ties by index).
/// Uncorrelated columns never join, so a constant f has an empty group.
std::vector<int> correlated_group(const Matrix& train, int f, int k);

struct Importance {
  int feature = 0;
  std::vector<int> group;         // shuffled together with the feature
  double baseline = 0.0;          // mean test AUC before shuffling
  std::vector<double> per_fold;   // baseline - shuffled mean AUC
  double degradation = 0.0;       // mean over folds
};

/// Fold j shuffles rows with one permutation drawn from derive_seed(seed, j),
/// the same for every feature, applied jointly to f and its group.
Importance permutation_importance(const ScoreFn& model, const Matrix& x_test, const LabelMatrix& y_test,
                                  const Matrix& x_train, int f, int k, int folds, std::uint64_t seed);

/// Every feature (or the listed ones), in input order.
std::vector<Importance> importance_table(const ScoreFn& model, const Matrix& x_test, const LabelMatrix& y_test,
                                         const Matrix& x_train, int k, int folds, std::uint64_t seed,
                                         const std::vector<int>& features = {});

/// Position of `feature` when fold j's degradations are sorted descending
/// (0 = most important; ties by feature index).
int rank_in_fold(const std::vector<Importance>& table, int feature, int fold);

}  // namespace toxblend::eval
