#include "toxblend/eval/auc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace toxblend::eval {

std::optional<double> roc_auc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DataError("labels and scores differ in length");
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double positives = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += avg_rank;
        positives += 1.0;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

std::optional<double> roc_auc(std::span<const Label> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DataError("labels and scores differ in length");
  std::vector<int> y;
  std::vector<double> s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!is_known(labels[i])) continue;
    y.push_back(labels[i] == Label::Active ? 1 : 0);
    s.push_back(scores[i]);
  }
  return roc_auc(y, s);
}

MeanAuc mean_auc(std::span<const std::optional<double>> aucs) {
  MeanAuc m;
  double sum = 0.0;
  for (const auto& a : aucs) {
    if (a) {
      sum += *a;
      ++m.used;
    } else {
      ++m.skipped;
    }
  }
  m.mean = m.used > 0 ? sum / m.used : std::numeric_limits<double>::quiet_NaN();
  return m;
}

}  // namespace toxblend::eval
