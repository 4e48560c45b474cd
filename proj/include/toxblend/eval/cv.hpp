#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toxblend/blend/blend.hpp"
#include "toxblend/blend/featurizers.hpp"
#include "toxblend/blend/member.hpp"
#include "toxblend/dataset/assay_table.hpp"
#include "toxblend/dataset/split.hpp"
#include "toxblend/eval/curves.hpp"
#include "toxblend/eval/importance.hpp"

namespace toxblend::eval {

inline constexpr const char* kAverageModel = "prediction-average";
inline constexpr const char* kBlendModel = "blend";

struct CvOptions {
  dataset::SplitStrategy strategy = dataset::SplitStrategy::Random;
  std::vector<std::uint64_t> seeds{0};
  dataset::Fractions fractions;
  std::vector<blend::MemberRecipe> members;
  bool blend = true;
  blend::BlendConfig blend_config;
  blend::NGramOptions ngram;
  int knn_k = 5;
  std::vector<double> reliability_thresholds{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int complexity_buckets = 4;

  /// Throws ConfigError listing every problem.
  void validate() const;
  /// Index splits are deterministic: one repetition whatever the seeds.
  std::vector<std::uint64_t> effective_seeds() const;
};

/// Which folds each artifact consumed, derived from the rows it was given.
struct FoldAudit {
  struct Entry {
    std::string artifact;
    std::vector<dataset::Fold> folds;
  };
  std::vector<Entry> entries;

  void record(const std::string& artifact, const dataset::SplitAssignment& split, std::span<const int> rows);
  /// Throws Error if any artifact consumed the test fold.
  void check() const;
};

/// Everything one seed produces.
struct SeedRun {
  std::uint64_t seed = 0;
  dataset::SplitAssignment split;
  blend::Featurizers featurizers;
  std::vector<blend::TrainedMember> members;
  std::vector<Matrix> valid_scores;  // per member
  std::vector<Matrix> test_scores;   // per member
  Matrix average_test;
  std::optional<blend::BlendModel> blend;
  Matrix blend_test;
  std::vector<featurize::BitVector> train_fingerprints;
  std::vector<double> test_distances;
  std::vector<double> test_complexity;  // fingerprint popcount
  FoldAudit audit;
};

/// Split by the seed; vocabulary on train; members on train with early
/// stopping and grid selection on valid; blend on valid; scores on test.
/// Member i trains with derive_seed(seed, 1, i), the blend with derive_seed(seed, 2).
/// A given split (e.g. read from a split file) replaces the seeded one.
SeedRun run_seed(const dataset::AssayTable& table, const CvOptions& options, std::uint64_t seed,
                 const dataset::SplitAssignment* split = nullptr);

struct AucRow {
  std::uint64_t seed = 0;
  std::string fold;
  std::string model;
  std::string target;
  std::optional<double> auc;
};

struct ModelSummary {
  std::string model;
  std::vector<double> seed_means;  // mean over defined targets, per seed
  double mean = 0.0;               // over seeds
  double sd = 0.0;                 // sample sd over seeds, 0 for one seed
  int skipped = 0;                 // undefined target AUCs over all seeds
};

struct CurveRow {
  std::uint64_t seed = 0;
  std::string model;
  CurvePoint point;
};

struct ImportanceRow {
  std::string model;
  std::string feature;
  int k = 0;
  Importance importance;
};

struct EvalReport {
  std::string dataset;
  dataset::SplitStrategy strategy = dataset::SplitStrategy::Random;
  std::vector<std::uint64_t> seeds;
  std::string config_checksum;
  std::vector<std::string> targets;
  std::vector<AucRow> rows;
  std::vector<std::string> correlation_members;
  Matrix correlation;  // test fold, averaged over seeds
  std::vector<CurveRow> reliability;
  std::vector<CurveRow> complexity;
  std::vector<ImportanceRow> importance;

  /// Test-fold summaries recomputed from rows, in first-appearance order.
  std::vector<ModelSummary> summary() const;
  /// Mean over seeds of a model's test AUC for one target; nullopt if never defined.
  std::optional<double> target_auc(const std::string& model, const std::string& target) const;
};

/// Runs every effective seed and collects per-target AUCs of each member,
/// prediction averaging and the blend, plus correlation and curves.
/// splits: optional precomputed assignments by seed.
EvalReport run_cv(const dataset::AssayTable& table, const CvOptions& options, const std::string& dataset_name = "dataset",
                  const std::map<std::uint64_t, dataset::SplitAssignment>* splits = nullptr);

}  // namespace toxblend::eval
