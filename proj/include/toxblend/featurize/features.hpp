#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxblend/chem/graph.hpp"
#include "toxblend/common.hpp"
#include "toxblend/featurize/bitvector.hpp"
#include "toxblend/featurize/descriptors.hpp"
#include "toxblend/featurize/fingerprint.hpp"
#include "toxblend/featurize/ngrams.hpp"

namespace toxblend::featurize {

enum class Family { Pld, Fingerprint, NGram };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// Row-per-molecule dense matrices for each family.
Matrix pld_matrix(std::span<const chem::MolecularGraph> graphs, const DescriptorRegistry& reg);
Matrix fingerprint_matrix(std::span<const BitVector> bits);
Matrix ngram_matrix(std::span<const std::string> smiles, const NGramVocabulary& vocab);

std::vector<BitVector> fingerprints(std::span<const chem::MolecularGraph> graphs, const FingerprintSpec& spec);

}  // namespace toxblend::featurize
