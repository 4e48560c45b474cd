#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "toxblend/blend/blend.hpp"
#include "toxblend/blend/featurizers.hpp"
#include "toxblend/blend/member.hpp"
#include "toxblend/dataset/assay_table.hpp"

namespace toxblend::blend {

struct TargetInfo {
  std::string name;
  std::string family;
  std::optional<std::string> cv_auc;  // test AUC of this target, text as in eval_report
};

/// Everything needed to score new SMILES: frozen featurizers, members, the
/// blender (absent: prediction averaging) and the reliability reference set.
struct Bundle {
  std::vector<TargetInfo> targets;
  Featurizers featurizers;
  std::vector<TrainedMember> members;
  std::optional<BlendModel> blend;
  std::vector<featurize::BitVector> reference;  // training fingerprints
  int knn_k = 5;
  double reliability_threshold = 1.0;
  std::string config_checksum;
  std::string eval_report;  // TSV text, may be empty
};

/// q-quantile (linear interpolation) of leave-one-out kNN Jaccard distances.
double reliability_threshold(std::span<const featurize::BitVector> train, int k, double q = 0.9);

/// Directory with one file per component and manifest.json listing each
/// file's SHA-256; manifest.sha256 holds the digest of manifest.json.
void save_bundle(const Bundle& b, const std::string& dir);
/// Verifies every checksum before loading.
Bundle load_bundle(const std::string& dir);
/// Digest of the manifest (the bundle's identity).
std::string bundle_checksum(const std::string& dir);

struct TargetPrediction {
  std::string target;
  std::string family;
  double score = 0.0;
  std::optional<std::string> cv_auc;
  double distance = 0.0;
  bool reliable = false;
};

struct MoleculePrediction {
  std::string input;
  std::string canonical;
  std::optional<std::string> error;  // parse failure reason; no targets then
  std::vector<TargetPrediction> targets;
};

/// Member scores for valid molecules in input order (molecules x targets each).
std::vector<Matrix> member_scores(const Bundle& b, FeatureCache& cache);

/// Per-input predictions; unparseable inputs carry an error instead of
/// failing the batch. target_filter selects target indices (empty: all).
std::vector<MoleculePrediction> predict_bundle(const Bundle& b, std::span<const std::string> smiles,
                                               std::span<const int> target_filter = {});

}  // namespace toxblend::blend
