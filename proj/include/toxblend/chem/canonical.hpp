#pragma once

#include <compare>
#include <string>

#include "toxblend/chem/graph.hpp"

namespace toxblend::chem {

/// Canonical string identity of a graph; equal for graphs that are identical
/// up to atom relabeling. The empty graph maps to "".
struct ScaffoldKey {
  std::string value;

  bool empty() const { return value.empty(); }
  auto operator<=>(const ScaffoldKey&) const = default;
};

/// Morgan-style rank refinement to a discrete partition, individualizing
/// tied atoms and keeping the lexicographically smallest serialization.
/// Interchangeable twin atoms are explored once.
ScaffoldKey canonical_key(const MolecularGraph& g);

/// Canonical atom order used for the key: order[i] is the atom placed i-th.
std::vector<int> canonical_order(const MolecularGraph& g);

}  // namespace toxblend::chem
