#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/gbm/gbm.hpp"

namespace toxblend::blend {

/// Arithmetic mean of member scores.
double prediction_average(std::span<const double> scores);
/// Elementwise mean of member score matrices (molecules x targets).
Matrix prediction_average(std::span<const Matrix> member_scores);

struct BlendConfig {
  gbm::GbmConfig gbm = default_gbm();
  double holdout = 0.2;  // share of validation molecules used for early stopping
  std::uint64_t seed = 0;

  static gbm::GbmConfig default_gbm();
};

nlohmann::json to_json(const BlendConfig& c);
BlendConfig blend_config_from_json(const nlohmann::json& j);

/// Booster over member scores (one column per member, in manifest order)
/// plus the task id; monotone +1 on every member column.
struct BlendModel {
  std::vector<std::string> members;
  int targets = 0;
  gbm::BoostedModel model;
};

/// One row per (molecule, target); with labels only the known ones.
gbm::StackedRows stack_member_scores(std::span<const Matrix> scores, const LabelMatrix* labels);

/// Scores come from members that never saw these molecules. Molecules are
/// split by the seed into fitting and early-stopping parts.
BlendModel train_blend(std::span<const Matrix> scores, const LabelMatrix& labels, std::vector<std::string> members,
                       const BlendConfig& config);

Matrix predict_blend(const BlendModel& b, std::span<const Matrix> scores);

nlohmann::json to_json(const BlendModel& b);
BlendModel blend_from_json(const nlohmann::json& j);

struct Correlation {
  Matrix rho;                 // members x members, averaged over targets
  std::vector<int> excluded;  // pair-target combinations skipped per pair (row-major)
};

/// Pearson correlation of member scores per target over molecules with a
/// known label, averaged across targets. Constant vectors are skipped with
/// a warning; a pair with no defined target is NaN.
Correlation correlation_matrix(std::span<const Matrix> scores, const LabelMatrix& labels);

}  // namespace toxblend::blend
