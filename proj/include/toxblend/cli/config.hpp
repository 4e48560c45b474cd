#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/blend/blend.hpp"
#include "toxblend/blend/featurizers.hpp"
#include "toxblend/blend/member.hpp"
#include "toxblend/dataset/assay_table.hpp"
#include "toxblend/dataset/split.hpp"
#include "toxblend/dataset/synthetic.hpp"
#include "toxblend/eval/cv.hpp"

namespace toxblend::cli {

struct DatasetConfig {
  std::string format = "csv";  // csv | table | synthetic
  std::string path;
  std::string name = "dataset";
  dataset::CsvLayout layout;
  dataset::SyntheticOptions synthetic;
};

struct ImportanceConfig {
  std::string member = "gbm-pld";
  std::vector<int> k{0, 5, 10};
  int folds = 5;
  std::vector<std::string> features;  // empty: every feature of the member's family
};

/// Key hierarchy (JSON):
///   dataset.{format, path, name, smiles_column, id_column, targets[], synthetic.{molecules, missing_rate, label_noise}}
///   features[]                      pld | fingerprint | ngram
///   ngram.{n_max, min_count}
///   split.{strategies[], fractions.{train, valid, test}}
///   seeds[]
///   members[]                       "<kind>-<family>" or a recipe object
///   blend.{enabled, holdout, gbm{...}}
///   reliability.{knn_k, thresholds[], complexity_buckets}
///   importance.{member, k[], folds, features[]}
///   output
/// Omitted keys take their defaults. One global seed per repetition; every
/// sub-seed derives from it (split: the seed, member i: derive(seed, 1, i),
/// blend: derive(seed, 2), synthetic data: dataset.synthetic.seed).
struct RunConfig {
  DatasetConfig dataset;
  std::vector<featurize::Family> features;
  blend::NGramOptions ngram;
  std::vector<dataset::SplitStrategy> strategies;
  dataset::Fractions fractions;
  std::vector<std::uint64_t> seeds;
  std::vector<blend::MemberRecipe> members;
  bool blend = true;
  blend::BlendConfig blend_config;
  int knn_k = 5;
  std::vector<double> thresholds;
  int complexity_buckets = 4;
  ImportanceConfig importance;
  std::string output = "out";

  nlohmann::json effective;  // resolved configuration, defaults included

  /// SHA-256 of the resolved configuration without the output directory.
  std::string checksum() const;
  eval::CvOptions cv_options(dataset::SplitStrategy strategy) const;
};

nlohmann::json default_config();

/// Merges user JSON over the defaults, applies "a.b.c=value" overrides
/// (scalar keys only; value parsed as JSON, else taken as a string) and the
/// seed override, then validates. Throws ConfigError listing every problem.
RunConfig resolve_config(const nlohmann::json& user, const std::vector<std::string>& overrides = {},
                         std::optional<std::uint64_t> seed = std::nullopt);

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                      std::optional<std::uint64_t> seed = std::nullopt);

dataset::AssayTable load_dataset(const DatasetConfig& d);

}  // namespace toxblend::cli
