#include "toxblend/chem/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

namespace toxblend::chem {
namespace {

using Ranks = std::vector<long>;

// Re-densifies arbitrary sortable signatures into ranks 0..k-1.
template <typename Sig>
Ranks densify(const std::vector<Sig>& sigs) {
  std::vector<int> idx(sigs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return sigs[a] < sigs[b]; });
  Ranks ranks(sigs.size());
  long r = -1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i == 0 || sigs[idx[i - 1]] < sigs[idx[i]]) ++r;
    ranks[idx[i]] = r;
  }
  return ranks;
}

long class_count(const Ranks& r) {
  return r.empty() ? 0 : *std::max_element(r.begin(), r.end()) + 1;
}

Ranks initial_ranks(const MolecularGraph& g) {
  using Inv = std::tuple<int, int, int, int, int, int, int>;
  std::vector<Inv> sigs;
  for (const auto& a : g.atoms()) {
    sigs.emplace_back(a.atomic_number, a.aromatic, a.charge, a.hydrogens, a.degree, a.in_ring,
                      a.isotope);
  }
  return densify(sigs);
}

Ranks refine(const MolecularGraph& g, Ranks ranks) {
  long classes = class_count(ranks);
  for (;;) {
    std::vector<std::vector<long>> sigs(ranks.size());
    for (int a = 0; a < g.atom_count(); ++a) {
      std::vector<long> nbrs;
      for (const auto& nb : g.neighbors(a)) {
        nbrs.push_back(ranks[nb.atom] * 8 + static_cast<long>(g.bond(nb.bond).order));
      }
      std::sort(nbrs.begin(), nbrs.end());
      sigs[a].push_back(ranks[a]);
      sigs[a].insert(sigs[a].end(), nbrs.begin(), nbrs.end());
    }
    Ranks next = densify(sigs);
    const long next_classes = class_count(next);
    ranks = std::move(next);
    if (next_classes == classes) return ranks;
    classes = next_classes;
  }
}

std::string serialize(const MolecularGraph& g, const Ranks& ranks) {
  std::vector<int> order(ranks.size());
  for (int a = 0; a < g.atom_count(); ++a) order[ranks[a]] = a;
  std::string out;
  for (int a : order) {
    const Atom& at = g.atom(a);
    if (at.isotope) out += std::to_string(at.isotope);
    out += at.symbol();
    if (at.aromatic) out += '~';
    if (at.charge) out += (at.charge > 0 ? "+" : "") + std::to_string(at.charge);
    out += 'h' + std::to_string(at.hydrogens);
    out += ';';
  }
  std::vector<std::tuple<long, long, int>> edges;
  for (const auto& b : g.bonds()) {
    long x = ranks[b.begin], y = ranks[b.end];
    if (x > y) std::swap(x, y);
    edges.emplace_back(x, y, static_cast<int>(b.order));
  }
  std::sort(edges.begin(), edges.end());
  out += '|';
  for (const auto& [x, y, o] : edges) {
    out += std::to_string(x) + '-' + std::to_string(y) + ':' + std::to_string(o) + ';';
  }
  return out;
}

// Twins: same rank, same neighbour multiset (ignoring each other) with the
// same bond orders. Swapping twins is an automorphism.
bool twins(const MolecularGraph& g, int a, int b) {
  auto nbr_list = [&](int x, int skip) {
    std::vector<std::pair<int, int>> v;
    for (const auto& nb : g.neighbors(x)) {
      if (nb.atom != skip) v.emplace_back(nb.atom, static_cast<int>(g.bond(nb.bond).order));
    }
    std::sort(v.begin(), v.end());
    return v;
  };
  return nbr_list(a, b) == nbr_list(b, a);
}

struct Search {
  const MolecularGraph& g;
  std::string best;
  Ranks best_ranks;
  bool found = false;
  long leaves = 0;
  static constexpr long kLeafBudget = 20000;

  void run(const Ranks& ranks) {
    if (found && leaves >= kLeafBudget) return;
    const long classes = class_count(ranks);
    if (classes == static_cast<long>(ranks.size())) {
      ++leaves;
      std::string s = serialize(g, ranks);
      if (!found || s < best) {
        best = std::move(s);
        best_ranks = ranks;
        found = true;
      }
      return;
    }
    // First (lowest-rank) non-singleton class.
    std::vector<long> counts(static_cast<std::size_t>(classes), 0);
    for (long r : ranks) ++counts[r];
    long target = 0;
    while (counts[target] < 2) ++target;
    std::vector<int> members;
    for (int a = 0; a < g.atom_count(); ++a) {
      if (ranks[a] == target) members.push_back(a);
    }
    std::vector<int> tried;
    for (int chosen : members) {
      if (std::any_of(tried.begin(), tried.end(), [&](int t) { return twins(g, t, chosen); })) {
        continue;
      }
      tried.push_back(chosen);
      Ranks split(ranks.size());
      for (int a = 0; a < g.atom_count(); ++a) {
        split[a] = 2 * ranks[a] + ((ranks[a] == target && a != chosen) ? 1 : 0);
      }
      run(refine(g, densify(split)));
    }
  }
};

}  // namespace

std::vector<int> canonical_order(const MolecularGraph& g) {
  if (g.empty()) return {};
  Search search{g, {}, {}};
  search.run(refine(g, initial_ranks(g)));
  std::vector<int> order(g.atoms().size());
  for (int a = 0; a < g.atom_count(); ++a) order[search.best_ranks[a]] = a;
  return order;
}

ScaffoldKey canonical_key(const MolecularGraph& g) {
  if (g.empty()) return {};
  Search search{g, {}, {}};
  search.run(refine(g, initial_ranks(g)));
  return {search.best};
}

}  // namespace toxblend::chem
