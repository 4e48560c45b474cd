#include "toxblend/chem/scaffold.hpp"

#include <vector>

namespace toxblend::chem {

MolecularGraph murcko_scaffold(const MolecularGraph& g) {
  const int n = g.atom_count();
  bool any_ring = false;
  for (const auto& a : g.atoms()) any_ring |= a.in_ring;
  if (!any_ring) return {};

  std::vector<bool> kept(static_cast<std::size_t>(n), true);
  std::vector<int> degree(static_cast<std::size_t>(n));
  std::vector<int> queue;
  for (int a = 0; a < n; ++a) {
    degree[a] = g.atom(a).degree;
    if (!g.atom(a).in_ring && degree[a] <= 1) queue.push_back(a);
  }
  while (!queue.empty()) {
    const int a = queue.back();
    queue.pop_back();
    if (!kept[a]) continue;
    kept[a] = false;
    for (const auto& nb : g.neighbors(a)) {
      if (!kept[nb.atom]) continue;
      if (--degree[nb.atom] <= 1 && !g.atom(nb.atom).in_ring) queue.push_back(nb.atom);
    }
  }

  std::vector<bool> restore(static_cast<std::size_t>(n), false);
  for (int a = 0; a < n; ++a) {
    if (kept[a]) continue;
    for (const auto& nb : g.neighbors(a)) {
      if (kept[nb.atom] && g.bond(nb.bond).order == BondOrder::Double) restore[a] = true;
    }
  }
  std::vector<int> keep;
  for (int a = 0; a < n; ++a) {
    if (kept[a] || restore[a]) keep.push_back(a);
  }
  return induced_subgraph(g, keep, true);
}

}  // namespace toxblend::chem
