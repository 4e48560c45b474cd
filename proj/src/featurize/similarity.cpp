#include "toxblend/featurize/similarity.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "toxblend/common.hpp"

namespace toxblend::featurize {
namespace {

double knn_mean(const BitVector& x, std::span<const BitVector> train, int k, std::ptrdiff_t skip) {
  const auto available = static_cast<std::ptrdiff_t>(train.size()) - (skip >= 0 ? 1 : 0);
  if (available <= 0) throw DataError("empty training set for distance");
  if (k < 1 || k > available) throw DataError("k must lie in [1, training size]");
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (static_cast<std::ptrdiff_t>(i) == skip) continue;
    d.emplace_back(jaccard_distance(x, train[i]), i);
  }
  std::partial_sort(d.begin(), d.begin() + k, d.end());
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += d[static_cast<std::size_t>(i)].first;
  return sum / k;
}

}  // namespace

double jaccard_distance(const BitVector& a, const BitVector& b) {
  const auto u = union_count(a, b);
  if (u == 0) return 0.0;
  return 1.0 - static_cast<double>(intersection_count(a, b)) / static_cast<double>(u);
}

double jaccard_knn_distance(const BitVector& x, std::span<const BitVector> train, int k) {
  return knn_mean(x, train, k, -1);
}

double jaccard_knn_distance_excluding(std::span<const BitVector> train, std::size_t i, int k) {
  return knn_mean(train[i], train, k, static_cast<std::ptrdiff_t>(i));
}

int complexity(const BitVector& x) { return static_cast<int>(x.count()); }

}  // namespace toxblend::featurize
