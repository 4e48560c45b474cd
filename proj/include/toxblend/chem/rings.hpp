#pragma once

#include <vector>

#include "toxblend/chem/graph.hpp"

namespace toxblend::chem {

struct Ring {
  /// Atoms in cycle order.
  std::vector<int> atoms;
  /// bonds[i] joins atoms[i] and atoms[(i + 1) % size].
  std::vector<int> bonds;

  int size() const { return static_cast<int>(atoms.size()); }
};

/// A minimum cycle basis (Horton candidates + GF(2) elimination). Rings come
/// out sorted by size; equal-size rings by their sorted bond lists.
std::vector<Ring> minimum_cycle_basis(const MolecularGraph& g);

/// Sizes of a minimum cycle basis, ascending. The multiset is unique even
/// when the basis itself is not.
std::vector<int> ring_sizes(const MolecularGraph& g);

}  // namespace toxblend::chem
