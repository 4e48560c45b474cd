#include "toxblend/featurize/features.hpp"

namespace toxblend::featurize {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Pld: return "pld";
    case Family::Fingerprint: return "fingerprint";
    case Family::NGram: return "ngram";
  }
  return "pld";
}

Family parse_family(std::string_view name) {
  if (name == "pld") return Family::Pld;
  if (name == "fingerprint") return Family::Fingerprint;
  if (name == "ngram") return Family::NGram;
  throw ConfigError("unknown feature family '" + std::string(name) + "'");
}

Matrix pld_matrix(std::span<const chem::MolecularGraph> graphs, const DescriptorRegistry& reg) {
  Matrix m(static_cast<Eigen::Index>(graphs.size()), static_cast<Eigen::Index>(reg.size()));
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = compute_pld(graphs[i], reg).transpose();
  }
  return m;
}

Matrix fingerprint_matrix(std::span<const BitVector> bits) {
  const auto width = bits.empty() ? 0 : bits.front().size();
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(bits.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      if (bits[i].test(j)) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
    }
  }
  return m;
}

Matrix ngram_matrix(std::span<const std::string> smiles, const NGramVocabulary& vocab) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(smiles.size()), static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < smiles.size(); ++i) {
    for (const auto& [col, count] : smiles_ngrams(smiles[i], vocab)) m(static_cast<Eigen::Index>(i), col) = count;
  }
  return m;
}

std::vector<BitVector> fingerprints(std::span<const chem::MolecularGraph> graphs, const FingerprintSpec& spec) {
  std::vector<BitVector> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(compute_fingerprint(g, spec));
  return out;
}

}  // namespace toxblend::featurize
