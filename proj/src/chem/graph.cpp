#include "toxblend/chem/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>

#include "toxblend/chem/canonical.hpp"
#include "toxblend/chem/elements.hpp"
#include "toxblend/common.hpp"

namespace toxblend::chem {

std::string_view Atom::symbol() const { return element(atomic_number).symbol; }

namespace {

// Iterative Tarjan bridge finding; marks every non-bridge bond as a ring bond.
void mark_ring_bonds(int n, std::span<const int> offsets, std::span<const Neighbor> adj,
                     std::vector<Bond>& bonds) {
  std::vector<int> disc(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  int timer = 0;
  struct Frame {
    int atom;
    int parent_bond;
    int next;
  };
  std::vector<Frame> stack;
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    stack.push_back({root, -1, offsets[root]});
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < offsets[f.atom + 1]) {
        const Neighbor nb = adj[f.next++];
        if (nb.bond == f.parent_bond) continue;
        if (disc[nb.atom] == -1) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, offsets[nb.atom]});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
          bonds[nb.bond].in_ring = true;
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& parent = stack.back();
          low[parent.atom] = std::min(low[parent.atom], low[done.atom]);
          if (low[done.atom] <= disc[parent.atom]) bonds[done.parent_bond].in_ring = true;
        }
      }
    }
  }
}

}  // namespace

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = atom_count();
  for (auto& a : atoms_) {
    if (a.hydrogens < 0) throw DataError("negative hydrogen count");
    element(a.atomic_number);
    a.degree = 0;
    a.in_ring = false;
  }
  std::vector<std::pair<int, int>> seen;
  seen.reserve(bonds_.size());
  for (auto& b : bonds_) {
    if (b.begin < 0 || b.end < 0 || b.begin >= n || b.end >= n) {
      throw DataError("bond endpoint out of range");
    }
    if (b.begin == b.end) throw DataError("self bond on atom " + std::to_string(b.begin));
    seen.emplace_back(std::min(b.begin, b.end), std::max(b.begin, b.end));
    b.in_ring = false;
    ++atoms_[b.begin].degree;
    ++atoms_[b.end].degree;
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    throw DataError("duplicate bond");
  }

  offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& b : bonds_) {
    ++offsets_[b.begin + 1];
    ++offsets_[b.end + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(bonds_.size() * 2);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int i = 0; i < bond_count(); ++i) {
    const auto& b = bonds_[i];
    adjacency_[fill[b.begin]++] = {b.end, i};
    adjacency_[fill[b.end]++] = {b.begin, i};
  }

  mark_ring_bonds(n, offsets_, adjacency_, bonds_);
  for (const auto& b : bonds_) {
    if (b.in_ring) atoms_[b.begin].in_ring = atoms_[b.end].in_ring = true;
  }
}

std::span<const Neighbor> MolecularGraph::neighbors(int atom) const {
  const auto first = static_cast<std::size_t>(offsets_[atom]);
  const auto last = static_cast<std::size_t>(offsets_[atom + 1]);
  return std::span<const Neighbor>(adjacency_).subspan(first, last - first);
}

std::optional<int> MolecularGraph::bond_between(int a, int b) const {
  for (const auto& nb : neighbors(a)) {
    if (nb.atom == b) return nb.bond;
  }
  return std::nullopt;
}

MolecularGraph permute_atoms(const MolecularGraph& g, std::span<const int> new_index,
                             std::span<const int> bond_order) {
  if (static_cast<int>(new_index.size()) != g.atom_count()) {
    throw Error("permutation size does not match atom count");
  }
  std::vector<Atom> atoms(g.atoms().size());
  for (int i = 0; i < g.atom_count(); ++i) atoms[new_index[i]] = g.atom(i);
  std::vector<Bond> bonds;
  bonds.reserve(g.bonds().size());
  for (int k = 0; k < g.bond_count(); ++k) {
    const int src = bond_order.empty() ? k : bond_order[k];
    Bond b = g.bond(src);
    b.begin = new_index[b.begin];
    b.end = new_index[b.end];
    bonds.push_back(b);
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

std::vector<std::vector<int>> connected_components(const MolecularGraph& g) {
  std::vector<int> comp(static_cast<std::size_t>(g.atom_count()), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.atom_count(); ++s) {
    if (comp[s] != -1) continue;
    std::vector<int> members{s};
    comp[s] = static_cast<int>(out.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (const auto& nb : g.neighbors(members[i])) {
        if (comp[nb.atom] == -1) {
          comp[nb.atom] = comp[s];
          members.push_back(nb.atom);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

MolecularGraph induced_subgraph(const MolecularGraph& g, std::span<const int> keep,
                                bool cap_with_hydrogens) {
  std::vector<int> index(static_cast<std::size_t>(g.atom_count()), -1);
  std::vector<Atom> atoms;
  atoms.reserve(keep.size());
  for (int a : keep) {
    index[a] = static_cast<int>(atoms.size());
    atoms.push_back(g.atom(a));
  }
  std::vector<Bond> bonds;
  for (const auto& b : g.bonds()) {
    const int ib = index[b.begin], ie = index[b.end];
    if (ib >= 0 && ie >= 0) {
      bonds.push_back({ib, ie, b.order, false});
    } else if (cap_with_hydrogens) {
      for (int k : {ib, ie}) {
        if (k >= 0 && has_default_valence(atoms[k].atomic_number)) atoms[k].hydrogens += bond_valence(b.order);
      }
    }
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

MolecularGraph largest_fragment(const MolecularGraph& g) {
  const auto comps = connected_components(g);
  if (comps.size() <= 1) return g;
  std::size_t best_size = 0;
  for (const auto& c : comps) best_size = std::max(best_size, c.size());
  std::optional<MolecularGraph> best;
  std::string best_key;
  for (const auto& c : comps) {
    if (c.size() != best_size) continue;
    MolecularGraph frag = induced_subgraph(g, c, false);
    std::string key = canonical_key(frag).value;
    if (!best || key < best_key) {
      best_key = std::move(key);
      best = std::move(frag);
    }
  }
  return *best;
}

std::vector<int> bfs_distances(const MolecularGraph& g, int source) {
  std::vector<int> dist(static_cast<std::size_t>(g.atom_count()), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop_front();
    for (const auto& nb : g.neighbors(a)) {
      if (dist[nb.atom] == -1) {
        dist[nb.atom] = dist[a] + 1;
        queue.push_back(nb.atom);
      }
    }
  }
  return dist;
}

}  // namespace toxblend::chem
