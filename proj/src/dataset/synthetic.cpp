#include "toxblend/dataset/synthetic.hpp"

#include <array>
#include <string_view>

#include "toxblend/chem/smiles.hpp"

namespace toxblend::dataset {

namespace {

constexpr std::array<std::string_view, 18> kPieces = {
    "C",       "CC",      "CCC",        "C(C)C",     "O",      "N",           "S",     "C(=O)",    "C(=O)N",
    "C(=O)O",  "C(N)",    "c1ccccc1",   "c1ccncc1",  "C1CCCCC1", "C1CCNC1",   "C(Cl)", "C(F)",     "c1ccc(Br)cc1",
};

std::string chain(Rng& rng, int pieces, int depth) {
  std::string s;
  for (int i = 0; i < pieces; ++i) {
    s += kPieces[rng.below(kPieces.size())];
    // Occasional branch on a plain carbon.
    if (depth < 2 && rng.bernoulli(0.15)) s += "C(" + chain(rng, 1 + static_cast<int>(rng.below(2)), depth + 1) + ")";
  }
  return s;
}

}  // namespace

std::string random_smiles(Rng& rng, int min_pieces, int max_pieces) {
  if (min_pieces < 1 || max_pieces < min_pieces) throw ConfigError("invalid piece range");
  const int n = min_pieces + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_pieces - min_pieces + 1)));
  return chain(rng, n, 0);
}

bool has_amide(const chem::MolecularGraph& g) {
  for (int a = 0; a < g.atom_count(); ++a) {
    if (g.atom(a).atomic_number != 6 || g.atom(a).aromatic) continue;
    bool carbonyl = false, nitrogen = false;
    for (const auto& nb : g.neighbors(a)) {
      const auto& other = g.atom(nb.atom);
      const auto order = g.bond(nb.bond).order;
      if (other.atomic_number == 8 && order == chem::BondOrder::Double) carbonyl = true;
      if (other.atomic_number == 7 && order == chem::BondOrder::Single) nitrogen = true;
    }
    if (carbonyl && nitrogen) return true;
  }
  return false;
}

bool is_large_aromatic(const chem::MolecularGraph& g) {
  int aromatic = 0;
  for (const auto& a : g.atoms()) aromatic += a.aromatic ? 1 : 0;
  return aromatic >= 6 && g.atom_count() >= 12;
}

bool has_halogen(const chem::MolecularGraph& g) {
  for (const auto& a : g.atoms()) {
    const int z = a.atomic_number;
    if (z == 9 || z == 17 || z == 35 || z == 53) return true;
  }
  return false;
}

AssayTable synthetic_table(const SyntheticOptions& options) {
  if (options.molecules < 1) throw ConfigError("synthetic table needs at least one molecule");
  Rng rng(options.seed);
  std::vector<Molecule> molecules;
  std::vector<chem::MolecularGraph> graphs;
  LabelMatrix labels(options.molecules, 3);
  for (int i = 0; i < options.molecules; ++i) {
    std::string smiles = random_smiles(rng);
    chem::MolecularGraph g = chem::parse_molecule(smiles);
    const std::array<bool, 3> truth = {has_amide(g), is_large_aromatic(g), has_halogen(g)};
    for (int t = 0; t < 3; ++t) {
      bool y = truth[static_cast<std::size_t>(t)];
      if (rng.bernoulli(options.label_noise)) y = !y;
      labels(i, t) = rng.bernoulli(options.missing_rate) ? Label::Missing : (y ? Label::Active : Label::Inactive);
    }
    molecules.push_back({"syn-" + std::to_string(i + 1), std::move(smiles)});
    graphs.push_back(std::move(g));
  }
  std::vector<Target> targets = {{"SYN-amide", "Synthetic"}, {"SYN-aromatic", "Synthetic"}, {"SYN-halogen", "Synthetic"}};
  return AssayTable(std::move(molecules), std::move(graphs), std::move(targets), std::move(labels));
}

}  // namespace toxblend::dataset
