#pragma once

#include <cstdint>
#include <string>

#include "toxblend/dataset/assay_table.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::dataset {

/// Random valid SMILES assembled from a small fragment grammar (chains,
/// branches, aliphatic and aromatic rings, heteroatoms, halogens).
std::string random_smiles(Rng& rng, int min_pieces = 2, int max_pieces = 8);

/// Planted rules, evaluated on the parsed graph.
bool has_amide(const chem::MolecularGraph& g);         // C(=O)-N
bool is_large_aromatic(const chem::MolecularGraph& g); // >= 6 aromatic atoms and >= 12 heavy atoms
bool has_halogen(const chem::MolecularGraph& g);       // F, Cl, Br or I

struct SyntheticOptions {
  int molecules = 2000;
  double missing_rate = 0.1;
  double label_noise = 0.02;
  std::uint64_t seed = 0;
};

/// Three targets SYN-amide, SYN-aromatic, SYN-halogen labelled by the rules
/// above, with missing labels and flipped labels at the given rates.
AssayTable synthetic_table(const SyntheticOptions& options);

}  // namespace toxblend::dataset
