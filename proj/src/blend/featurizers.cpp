#include "toxblend/blend/featurizers.hpp"

namespace toxblend::blend {

Featurizers build_featurizers(std::span<const std::string> train_smiles, const NGramOptions& options) {
  Featurizers f;
  f.vocab = featurize::build_ngram_vocabulary(train_smiles, options.n_max, options.min_count);
  return f;
}

nlohmann::json to_json(const Featurizers& f) {
  return {{"descriptors", f.registry.serialize()}, {"fingerprint", f.spec.serialize()}, {"ngrams", f.vocab.serialize()}};
}

Featurizers featurizers_from_json(const nlohmann::json& j) {
  Featurizers f;
  f.registry = featurize::DescriptorRegistry::parse(j.at("descriptors").get<std::string>());
  f.spec = featurize::FingerprintSpec::parse(j.at("fingerprint").get<std::string>());
  f.vocab = featurize::NGramVocabulary::parse(j.at("ngrams").get<std::string>());
  return f;
}

FeatureCache::FeatureCache(const Featurizers& f, std::span<const chem::MolecularGraph> graphs,
                           std::span<const std::string> smiles)
    : featurizers_(f), graphs_(graphs), smiles_(smiles) {
  if (graphs.size() != smiles.size()) throw DataError("graph and SMILES counts differ");
}

const std::vector<featurize::BitVector>& FeatureCache::fingerprints() {
  if (!bits_) bits_ = featurize::fingerprints(graphs_, featurizers_.spec);
  return *bits_;
}

const Matrix& FeatureCache::matrix(featurize::Family family) {
  switch (family) {
    case featurize::Family::Pld:
      if (!pld_) pld_ = featurize::pld_matrix(graphs_, featurizers_.registry);
      return *pld_;
    case featurize::Family::Fingerprint:
      if (!fp_) fp_ = featurize::fingerprint_matrix(fingerprints());
      return *fp_;
    case featurize::Family::NGram:
      if (!ngram_) ngram_ = featurize::ngram_matrix(smiles_, featurizers_.vocab);
      return *ngram_;
  }
  throw Error("unknown feature family");
}

Matrix take_rows(const Matrix& m, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
  return out;
}

LabelMatrix take_rows(const LabelMatrix& m, std::span<const int> rows) {
  LabelMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
  return out;
}

std::vector<std::string> feature_names(const Featurizers& f, featurize::Family family) {
  switch (family) {
    case featurize::Family::Pld: return f.registry.names();
    case featurize::Family::Fingerprint: return f.spec.names();
    case featurize::Family::NGram: return f.vocab.terms();
  }
  throw Error("unknown feature family");
}

}  // namespace toxblend::blend
