#include "toxblend/chem/writer.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "toxblend/chem/canonical.hpp"
#include "toxblend/chem/elements.hpp"
#include "toxblend/chem/smiles.hpp"

namespace toxblend::chem {

namespace {

int bond_sum(const MolecularGraph& g, int a) {
  int v = 0;
  for (const auto& nb : g.neighbors(a)) v += bond_valence(g.bond(nb.bond).order);
  return v;
}

// Same rule the parser applies to bracket-free atoms.
int organic_hydrogens(const Atom& atom, int valence) {
  const auto allowed = standard_valences(atom.atomic_number);
  const int used = valence + (atom.aromatic && atom.atomic_number != z::O && atom.atomic_number != z::S ? 1 : 0);
  for (int v : allowed) {
    if (v >= used) return v - used;
  }
  return atom.aromatic ? 0 : -1;
}

std::string atom_text(const MolecularGraph& g, int a) {
  const Atom& atom = g.atom(a);
  std::string sym(atom.symbol());
  const bool aromatic_ok = atom.atomic_number == z::B || atom.atomic_number == z::C || atom.atomic_number == z::N ||
                           atom.atomic_number == z::O || atom.atomic_number == z::P || atom.atomic_number == z::S;
  if (atom.aromatic) {
    sym[0] = static_cast<char>(sym[0] - 'A' + 'a');
  }
  const bool organic = !standard_valences(atom.atomic_number).empty() && (!atom.aromatic || aromatic_ok);
  if (organic && atom.charge == 0 && atom.isotope == 0 && organic_hydrogens(atom, bond_sum(g, a)) == atom.hydrogens) {
    return sym;
  }
  std::string out = "[";
  if (atom.isotope > 0) out += std::to_string(atom.isotope);
  out += sym;
  if (atom.hydrogens > 0) out += "H" + (atom.hydrogens > 1 ? std::to_string(atom.hydrogens) : std::string());
  if (atom.charge != 0) {
    out += atom.charge > 0 ? "+" : "-";
    if (std::abs(atom.charge) > 1) out += std::to_string(std::abs(atom.charge));
  }
  return out + "]";
}

std::string bond_text(const MolecularGraph& g, int bond) {
  const Bond& b = g.bond(bond);
  switch (b.order) {
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic:
      return g.atom(b.begin).aromatic && g.atom(b.end).aromatic ? "" : ":";
    case BondOrder::Single:
      return g.atom(b.begin).aromatic && g.atom(b.end).aromatic ? "-" : "";
  }
  return "";
}

std::string ring_label(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

class Writer {
 public:
  explicit Writer(const MolecularGraph& g) : g_(g), rank_(static_cast<std::size_t>(g.atom_count())) {
    const auto order = canonical_order(g);
    for (std::size_t i = 0; i < order.size(); ++i) rank_[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    visited_.assign(rank_.size(), false);
    children_.resize(rank_.size());
    closures_.resize(rank_.size());
    tree_bond_.assign(static_cast<std::size_t>(g.bond_count()), false);
    closure_done_.assign(static_cast<std::size_t>(g.bond_count()), false);
  }

  std::string run() {
    std::vector<int> by_rank(rank_.size());
    for (std::size_t a = 0; a < rank_.size(); ++a) by_rank[static_cast<std::size_t>(rank_[a])] = static_cast<int>(a);
    std::string out;
    for (int a : by_rank) {
      if (visited_[static_cast<std::size_t>(a)]) continue;
      const int start = component_start(a);
      classify(start, -1);
      if (!out.empty()) out += ".";
      emit(start, out);
    }
    return out;
  }

 private:
  // Lowest-degree atom of a's component, lowest rank among those.
  int component_start(int a) const {
    std::vector<bool> seen(rank_.size(), false);
    std::vector<int> stack{a};
    seen[static_cast<std::size_t>(a)] = true;
    int best = a;
    auto better = [&](int x, int y) {
      const auto dx = g_.neighbors(x).size(), dy = g_.neighbors(y).size();
      return dx != dy ? dx < dy : rank_[static_cast<std::size_t>(x)] < rank_[static_cast<std::size_t>(y)];
    };
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (better(x, best)) best = x;
      for (const auto& nb : g_.neighbors(x)) {
        if (!seen[static_cast<std::size_t>(nb.atom)]) {
          seen[static_cast<std::size_t>(nb.atom)] = true;
          stack.push_back(nb.atom);
        }
      }
    }
    return best;
  }

  std::vector<std::pair<int, int>> sorted_neighbours(int a) const {
    std::vector<std::pair<int, int>> nbs;  // (atom, bond)
    for (const auto& nb : g_.neighbors(a)) nbs.emplace_back(nb.atom, nb.bond);
    std::sort(nbs.begin(), nbs.end(), [&](const auto& x, const auto& y) {
      return rank_[static_cast<std::size_t>(x.first)] < rank_[static_cast<std::size_t>(y.first)];
    });
    return nbs;
  }

  void classify(int a, int parent_bond) {
    visited_[static_cast<std::size_t>(a)] = true;
    for (const auto& [b, bond] : sorted_neighbours(a)) {
      if (bond == parent_bond) continue;
      if (!visited_[static_cast<std::size_t>(b)]) {
        tree_bond_[static_cast<std::size_t>(bond)] = true;
        children_[static_cast<std::size_t>(a)].emplace_back(b, bond);
        classify(b, bond);
      } else if (!tree_bond_[static_cast<std::size_t>(bond)] && !closure_done_[static_cast<std::size_t>(bond)]) {
        // b was entered earlier and is an ancestor: it opens, a closes.
        closure_done_[static_cast<std::size_t>(bond)] = true;
        closures_[static_cast<std::size_t>(b)].push_back(bond);
        closures_[static_cast<std::size_t>(a)].push_back(bond);
      }
    }
  }

  void emit(int a, std::string& out) {
    out += atom_text(g_, a);
    for (int bond : closures_[static_cast<std::size_t>(a)]) {
      const auto it = open_.find(bond);
      if (it == open_.end()) {
        int d = 1;
        while (used_.count(d)) ++d;
        used_.insert(d);
        open_[bond] = d;
        out += bond_text(g_, bond) + ring_label(d);
      } else {
        out += ring_label(it->second);
        used_.erase(it->second);
        open_.erase(it);
      }
    }
    const auto& kids = children_[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch) out += "(";
      out += bond_text(g_, kids[i].second);
      emit(kids[i].first, out);
      if (branch) out += ")";
    }
  }

  const MolecularGraph& g_;
  std::vector<int> rank_;
  std::vector<bool> visited_;
  std::vector<std::vector<std::pair<int, int>>> children_;
  std::vector<std::vector<int>> closures_;
  std::vector<bool> tree_bond_;
  std::vector<bool> closure_done_;
  std::map<int, int> open_;
  std::set<int> used_;
};

}  // namespace

std::string canonical_smiles(const MolecularGraph& g) {
  if (g.empty()) return "";
  return Writer(g).run();
}

}  // namespace toxblend::chem
