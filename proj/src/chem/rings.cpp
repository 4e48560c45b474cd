#include "toxblend/chem/rings.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>

namespace toxblend::chem {
namespace {

using EdgeSet = std::vector<std::uint64_t>;

struct Candidate {
  EdgeSet edges;
  std::vector<int> sorted_bonds;
  Ring ring;
};

EdgeSet make_edge_set(std::size_t n_bonds, const std::vector<int>& bonds) {
  EdgeSet s((n_bonds + 63) / 64, 0);
  for (int b : bonds) s[static_cast<std::size_t>(b) / 64] ^= std::uint64_t{1} << (b % 64);
  return s;
}

// Shortest-path tree from root; neighbours visited in adjacency order so the
// tree (and thus the candidate set) is deterministic.
struct PathTree {
  std::vector<int> parent_atom;
  std::vector<int> parent_bond;
  std::vector<int> depth;
};

PathTree bfs_tree(const MolecularGraph& g, int root) {
  const auto n = static_cast<std::size_t>(g.atom_count());
  PathTree t{std::vector<int>(n, -1), std::vector<int>(n, -1), std::vector<int>(n, -1)};
  std::deque<int> q{root};
  t.depth[root] = 0;
  while (!q.empty()) {
    const int a = q.front();
    q.pop_front();
    for (const auto& nb : g.neighbors(a)) {
      if (!g.bond(nb.bond).in_ring || t.depth[nb.atom] != -1) continue;
      t.depth[nb.atom] = t.depth[a] + 1;
      t.parent_atom[nb.atom] = a;
      t.parent_bond[nb.atom] = nb.bond;
      q.push_back(nb.atom);
    }
  }
  return t;
}

}  // namespace

std::vector<Ring> minimum_cycle_basis(const MolecularGraph& g) {
  int ring_bonds = 0;
  for (const auto& b : g.bonds()) ring_bonds += b.in_ring ? 1 : 0;
  if (ring_bonds == 0) return {};

  // Cyclomatic number of the ring subgraph: E - V + C restricted to ring
  // bonds equals that of the whole graph since bridges add nothing.
  const int cyclomatic = g.bond_count() - g.atom_count() + static_cast<int>(connected_components(g).size());

  std::map<std::vector<int>, Candidate> candidates;
  const auto n_bonds = static_cast<std::size_t>(g.bond_count());
  for (int v = 0; v < g.atom_count(); ++v) {
    if (!g.atom(v).in_ring) continue;
    const PathTree tree = bfs_tree(g, v);
    for (int e = 0; e < g.bond_count(); ++e) {
      const Bond& b = g.bond(e);
      if (!b.in_ring || tree.depth[b.begin] < 0 || tree.depth[b.end] < 0) continue;
      if (tree.parent_bond[b.begin] == e || tree.parent_bond[b.end] == e) continue;
      // Paths v->begin and v->end must meet only at v.
      std::vector<int> up_a, up_b, bonds_a, bonds_b;
      for (int x = b.begin; x != -1; x = tree.parent_atom[x]) {
        up_a.push_back(x);
        if (tree.parent_bond[x] >= 0) bonds_a.push_back(tree.parent_bond[x]);
      }
      for (int x = b.end; x != -1; x = tree.parent_atom[x]) {
        up_b.push_back(x);
        if (tree.parent_bond[x] >= 0) bonds_b.push_back(tree.parent_bond[x]);
      }
      std::vector<int> sa(up_a.begin(), up_a.end() - 1), sb(up_b.begin(), up_b.end() - 1);
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      std::vector<int> common;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
      if (!common.empty()) continue;

      Ring ring;
      // v ... begin (reverse of up_a), then end ... back towards v.
      ring.atoms.assign(up_a.rbegin(), up_a.rend());
      ring.bonds.assign(bonds_a.rbegin(), bonds_a.rend());
      ring.bonds.push_back(e);
      for (std::size_t i = 0; i + 1 < up_b.size(); ++i) {
        ring.atoms.push_back(up_b[i]);
        ring.bonds.push_back(bonds_b[i]);
      }
      std::vector<int> key = ring.bonds;
      std::sort(key.begin(), key.end());
      if (candidates.count(key)) continue;
      Candidate c{make_edge_set(n_bonds, key), key, std::move(ring)};
      candidates.emplace(std::move(key), std::move(c));
    }
  }

  std::vector<const Candidate*> order;
  order.reserve(candidates.size());
  for (const auto& [key, c] : candidates) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const Candidate* a, const Candidate* b) {
    return a->sorted_bonds.size() < b->sorted_bonds.size();
  });

  // Gaussian elimination over GF(2); basis rows keyed by their pivot bit.
  std::vector<std::pair<std::size_t, EdgeSet>> basis;
  std::vector<Ring> out;
  auto lowest_bit = [](const EdgeSet& s) -> std::ptrdiff_t {
    for (std::size_t w = 0; w < s.size(); ++w) {
      if (s[w]) return static_cast<std::ptrdiff_t>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(s[w])));
    }
    return -1;
  };
  for (const Candidate* c : order) {
    if (static_cast<int>(out.size()) == cyclomatic) break;
    EdgeSet v = c->edges;
    for (const auto& [pivot, row] : basis) {
      if (v[pivot / 64] >> (pivot % 64) & 1U) {
        for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= row[w];
      }
    }
    const auto pivot = lowest_bit(v);
    if (pivot < 0) continue;
    // Keep earlier rows reduced against the new pivot.
    for (auto& [p, row] : basis) {
      if (row[static_cast<std::size_t>(pivot) / 64] >> (pivot % 64) & 1U) {
        for (std::size_t w = 0; w < row.size(); ++w) row[w] ^= v[w];
      }
    }
    basis.emplace_back(static_cast<std::size_t>(pivot), std::move(v));
    out.push_back(c->ring);
  }
  return out;
}

std::vector<int> ring_sizes(const MolecularGraph& g) {
  std::vector<int> sizes;
  for (const auto& r : minimum_cycle_basis(g)) sizes.push_back(r.size());
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

}  // namespace toxblend::chem
