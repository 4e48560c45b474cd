#pragma once

#include <optional>
#include <span>
#include <vector>

#include "toxblend/common.hpp"

namespace toxblend::eval {

/// Mann-Whitney AUC with average ranks for tied scores. nullopt when the
/// labels hold a single class (undefined, not 0.5).
std::optional<double> roc_auc(std::span<const int> labels, std::span<const double> scores);

/// Same, skipping entries whose label is missing.
std::optional<double> roc_auc(std::span<const Label> labels, std::span<const double> scores);

struct MeanAuc {
  double mean = 0.0;  // NaN when every entry is undefined
  int used = 0;
  int skipped = 0;
};

/// Unweighted mean over defined AUCs.
MeanAuc mean_auc(std::span<const std::optional<double>> aucs);

}  // namespace toxblend::eval
