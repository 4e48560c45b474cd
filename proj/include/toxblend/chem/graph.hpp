#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace toxblend::chem {

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

/// Valence contributed by one bond, aromatic bonds counting as one.
inline int bond_valence(BondOrder order) {
  return order == BondOrder::Aromatic ? 1 : static_cast<int>(order);
}

struct Atom {
  int atomic_number = 0;
  bool aromatic = false;
  int charge = 0;
  /// Attached hydrogens not present as graph atoms (implicit or bracket H).
  int hydrogens = 0;
  int isotope = 0;
  /// Derived by MolecularGraph; ignored on input.
  int degree = 0;
  bool in_ring = false;

  std::string_view symbol() const;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::Single;
  /// Derived by MolecularGraph; ignored on input.
  bool in_ring = false;

  int other(int atom) const { return atom == begin ? end : begin; }
};

struct Neighbor {
  int atom;
  int bond;
};

/// Immutable undirected molecular graph. Construction validates endpoints,
/// rejects self loops and duplicate bonds, and derives degree and ring
/// membership (a bond is a ring bond iff it is not a bridge).
class MolecularGraph {
 public:
  MolecularGraph() = default;
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }
  const Atom& atom(int i) const { return atoms_[static_cast<std::size_t>(i)]; }
  const Bond& bond(int i) const { return bonds_[static_cast<std::size_t>(i)]; }
  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  std::span<const Neighbor> neighbors(int atom) const;
  std::optional<int> bond_between(int a, int b) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<int> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Copy of g where old atom i becomes atom new_index[i]. Bond list order is
/// permuted as well so the result shares nothing positional with g.
MolecularGraph permute_atoms(const MolecularGraph& g, std::span<const int> new_index,
                             std::span<const int> bond_order = {});

/// Connected components as sorted atom index lists, ordered by smallest atom.
std::vector<std::vector<int>> connected_components(const MolecularGraph& g);

/// Subgraph on `keep` (sorted, unique). Atoms that lose bonds gain the lost
/// valence as hydrogens when `cap_with_hydrogens` is set.
MolecularGraph induced_subgraph(const MolecularGraph& g, std::span<const int> keep,
                                bool cap_with_hydrogens);

/// Largest fragment by atom count; ties go to the lexicographically smallest
/// canonical key. Single-fragment graphs are returned unchanged.
MolecularGraph largest_fragment(const MolecularGraph& g);

/// BFS distances from `source` (-1 for unreachable atoms).
std::vector<int> bfs_distances(const MolecularGraph& g, int source);

}  // namespace toxblend::chem
