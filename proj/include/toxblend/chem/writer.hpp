#pragma once

#include <string>

#include "toxblend/chem/graph.hpp"

namespace toxblend::chem {

/// SMILES in canonical atom order: identical for relabeled copies of a
/// graph, and parse_smiles of the result gives back an isomorphic graph.
std::string canonical_smiles(const MolecularGraph& g);

}  // namespace toxblend::chem
