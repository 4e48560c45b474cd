#pragma once

#include <optional>
#include <span>
#include <vector>

#include "toxblend/common.hpp"
#include "toxblend/featurize/bitvector.hpp"

namespace toxblend::eval {

/// One bucket of test molecules: [lo, hi) on the bucketing quantity.
struct CurvePoint {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  std::optional<double> auc;  // mean over targets with a defined AUC
  int targets_used = 0;
  int targets_skipped = 0;
};

/// Mean per-target AUC over the given rows (molecules x targets).
CurvePoint bucket_auc(const Matrix& scores, const LabelMatrix& labels, std::span<const int> rows);

/// Mean Jaccard distance of each query to its k nearest training fingerprints.
std::vector<double> knn_distances(std::span<const featurize::BitVector> query,
                                  std::span<const featurize::BitVector> train, int k);

/// For each threshold t, the molecules with distance >= t (hi = +inf).
std::vector<CurvePoint> reliability_curve(const Matrix& scores, const LabelMatrix& labels,
                                          std::span<const double> distances, std::span<const double> thresholds);

/// Buckets between complexity quantiles j/buckets (linear interpolation);
/// the last bucket includes its upper edge. Empty buckets keep count 0.
std::vector<CurvePoint> complexity_curve(const Matrix& scores, const LabelMatrix& labels,
                                         std::span<const double> complexity, int buckets);

}  // namespace toxblend::eval
