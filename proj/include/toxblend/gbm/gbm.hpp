#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/common.hpp"

namespace toxblend::gbm {

enum class StopMetric { LogLoss, Auc };

inline constexpr std::array<double, 4> kShrinkageGrid = {1e-2, 5e-3, 1e-3, 5e-4};

struct GbmConfig {
  int max_rounds = 2000;
  int max_depth = 6;
  double eta = 1e-2;
  double lambda = 1.0;
  double min_child_hessian = 1.0;
  double min_split_gain = 0.0;
  int patience = 50;
  StopMetric stop_metric = StopMetric::LogLoss;
  /// NaN features are an error unless set; then they follow a learned
  /// default direction per split.
  bool allow_missing = false;

  void validate() const;
};

nlohmann::json to_json(const GbmConfig& c);
GbmConfig gbm_config_from_json(const nlohmann::json& j);

/// One row per (molecule, target) with a known label. The task id is the
/// last column when the source had more than one target column.
struct StackedRows {
  Matrix x;
  Vector y;
  std::vector<int> molecule;
  std::vector<int> task;
  int task_feature = -1;
};

/// Appends the integer task id as the last feature column.
StackedRows stack_tasks(const Matrix& features, const LabelMatrix& labels);

/// Same for unlabelled rows: every (molecule, target) pair, label 0.
StackedRows stack_all(const Matrix& features, int targets);

/// Flattened regression tree. Node 0 is the root; leaves have feature -1.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<bool> default_left;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;  // leaf weight, before shrinkage
  std::vector<double> gain;   // split gain, 0 at leaves
  std::vector<double> cover;  // hessian sum

  std::size_t size() const { return feature.size(); }
  bool is_leaf(int n) const { return feature[static_cast<std::size_t>(n)] < 0; }
  /// Leaf index reached by a row.
  int leaf(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return value[static_cast<std::size_t>(leaf(row))]; }
};

struct BoostedModel {
  GbmConfig config;
  double base_score = 0.0;  // log-odds of the training prior
  std::vector<Tree> trees;
  int feature_count = 0;
  int task_feature = -1;
  std::vector<int> monotone;  // +1, 0, -1 per feature
  std::vector<std::string> feature_names;
  std::vector<double> train_log;  // training loss after each round (index 0: no trees)
  std::vector<double> valid_log;  // validation metric after each round, when validated
};

/// Exact greedy boosting on logistic loss. monotone is empty (no
/// constraints) or one entry per column. With a validation set the returned
/// model is the prefix with the best validation metric.
BoostedModel train_gbm(const StackedRows& train, const GbmConfig& config, std::span<const int> monotone = {},
                       const StackedRows* valid = nullptr);

Vector predict_margin(const BoostedModel& m, const Matrix& x);
Vector predict_gbm(const BoostedModel& m, const Matrix& x);

/// Total split gain per feature, normalised to sum to 1.
Vector gain_importance(const BoostedModel& m);

double log_loss(const Vector& y, const Vector& p);

nlohmann::json to_json(const BoostedModel& m);
BoostedModel gbm_from_json(const nlohmann::json& j);
void save_gbm(const BoostedModel& m, const std::string& path);
BoostedModel load_gbm(const std::string& path);

}  // namespace toxblend::gbm
