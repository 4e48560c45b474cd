#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toxblend/featurize/features.hpp"

namespace toxblend::blend {

struct NGramOptions {
  int n_max = 4;
  int min_count = 5;
};

/// The frozen featurization state of a trained model: descriptor registry,
/// fingerprint spec and the n-gram vocabulary built on training SMILES.
struct Featurizers {
  featurize::DescriptorRegistry registry = featurize::DescriptorRegistry::pld_v1();
  featurize::FingerprintSpec spec = featurize::FingerprintSpec::default_spec();
  featurize::NGramVocabulary vocab;
};

/// The vocabulary sees only the given (training) SMILES.
Featurizers build_featurizers(std::span<const std::string> train_smiles, const NGramOptions& options = {});

/// Column names of a family's matrix.
std::vector<std::string> feature_names(const Featurizers& f, featurize::Family family);

nlohmann::json to_json(const Featurizers& f);
Featurizers featurizers_from_json(const nlohmann::json& j);

/// Dense matrices for every molecule, computed on demand per family.
class FeatureCache {
 public:
  FeatureCache(const Featurizers& f, std::span<const chem::MolecularGraph> graphs, std::span<const std::string> smiles);

  const Matrix& matrix(featurize::Family family);
  const std::vector<featurize::BitVector>& fingerprints();
  std::span<const chem::MolecularGraph> graphs() const { return graphs_; }

 private:
  const Featurizers& featurizers_;
  std::span<const chem::MolecularGraph> graphs_;
  std::span<const std::string> smiles_;
  std::optional<Matrix> pld_, fp_, ngram_;
  std::optional<std::vector<featurize::BitVector>> bits_;
};

/// Rows of m in the given order.
Matrix take_rows(const Matrix& m, std::span<const int> rows);
LabelMatrix take_rows(const LabelMatrix& m, std::span<const int> rows);

}  // namespace toxblend::blend
