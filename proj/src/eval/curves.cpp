#include "toxblend/eval/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toxblend/eval/auc.hpp"
#include "toxblend/featurize/similarity.hpp"

namespace toxblend::eval {

CurvePoint bucket_auc(const Matrix& scores, const LabelMatrix& labels, std::span<const int> rows) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) throw DataError("score and label shapes differ");
  CurvePoint p;
  p.count = static_cast<int>(rows.size());
  std::vector<std::optional<double>> aucs;
  for (Eigen::Index t = 0; t < labels.cols(); ++t) {
    std::vector<Label> l;
    std::vector<double> s;
    for (int r : rows) {
      l.push_back(labels(r, t));
      s.push_back(scores(r, t));
    }
    aucs.push_back(roc_auc(l, s));
  }
  const auto m = mean_auc(aucs);
  p.targets_used = m.used;
  p.targets_skipped = m.skipped;
  if (m.used > 0) p.auc = m.mean;
  return p;
}

std::vector<double> knn_distances(std::span<const featurize::BitVector> query,
                                  std::span<const featurize::BitVector> train, int k) {
  if (train.empty()) throw DataError("empty training fingerprint set");
  const int kk = std::min<int>(k, static_cast<int>(train.size()));
  std::vector<double> out;
  out.reserve(query.size());
  for (const auto& q : query) out.push_back(featurize::jaccard_knn_distance(q, train, kk));
  return out;
}

std::vector<CurvePoint> reliability_curve(const Matrix& scores, const LabelMatrix& labels,
                                          std::span<const double> distances, std::span<const double> thresholds) {
  if (static_cast<Eigen::Index>(distances.size()) != scores.rows()) throw DataError("one distance per molecule expected");
  std::vector<CurvePoint> out;
  for (double t : thresholds) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < distances.size(); ++i) {
      if (distances[i] >= t) rows.push_back(static_cast<int>(i));
    }
    auto p = bucket_auc(scores, labels, rows);
    p.lo = t;
    p.hi = std::numeric_limits<double>::infinity();
    out.push_back(p);
  }
  return out;
}

std::vector<CurvePoint> complexity_curve(const Matrix& scores, const LabelMatrix& labels,
                                         std::span<const double> complexity, int buckets) {
  if (buckets < 1) throw ConfigError("complexity curve needs at least one bucket");
  if (static_cast<Eigen::Index>(complexity.size()) != scores.rows()) throw DataError("one complexity value per molecule expected");
  if (complexity.empty()) throw DataError("complexity curve of an empty test set");
  std::vector<double> sorted(complexity.begin(), complexity.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int j = 0; j <= buckets; ++j) {
    const double pos = static_cast<double>(j) / buckets * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    edges.push_back(sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
  }
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(buckets));
  for (std::size_t i = 0; i < complexity.size(); ++i) {
    int j = 0;
    while (j + 1 < buckets && complexity[i] >= edges[static_cast<std::size_t>(j + 1)]) ++j;
    rows[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
  }
  std::vector<CurvePoint> out;
  for (int j = 0; j < buckets; ++j) {
    auto p = bucket_auc(scores, labels, rows[static_cast<std::size_t>(j)]);
    p.lo = edges[static_cast<std::size_t>(j)];
    p.hi = edges[static_cast<std::size_t>(j + 1)];
    out.push_back(p);
  }
  return out;
}

}  // namespace toxblend::eval
