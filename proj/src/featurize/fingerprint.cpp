#include "toxblend/featurize/fingerprint.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <sstream>

#include "toxblend/chem/elements.hpp"
#include "toxblend/chem/rings.hpp"
#include "toxblend/common.hpp"

namespace toxblend::featurize {

using chem::BondOrder;
using chem::MolecularGraph;

namespace {

constexpr std::string_view kHeader = "# toxblend fingerprint spec v1";

constexpr std::array<std::pair<RingQualifier, std::string_view>, 9> kQualifiers = {{
    {RingQualifier::Any, "any"},
    {RingQualifier::SaturatedOrAromaticCarbon, "sat-arom-carbon"},
    {RingQualifier::SaturatedOrAromaticNitrogen, "sat-arom-nitrogen"},
    {RingQualifier::SaturatedOrAromaticHetero, "sat-arom-hetero"},
    {RingQualifier::UnsaturatedCarbon, "unsat-nonarom-carbon"},
    {RingQualifier::UnsaturatedNitrogen, "unsat-nonarom-nitrogen"},
    {RingQualifier::UnsaturatedHetero, "unsat-nonarom-hetero"},
    {RingQualifier::Aromatic, "aromatic"},
    {RingQualifier::Heteroaromatic, "heteroaromatic"},
}};

std::string_view qualifier_token(RingQualifier q) {
  for (const auto& [k, s] : kQualifiers) {
    if (k == q) return s;
  }
  return "any";
}

std::string qualifier_phrase(RingQualifier q) {
  switch (q) {
    case RingQualifier::Any: return "any";
    case RingQualifier::SaturatedOrAromaticCarbon: return "saturated or aromatic carbon-only";
    case RingQualifier::SaturatedOrAromaticNitrogen: return "saturated or aromatic nitrogen-containing";
    case RingQualifier::SaturatedOrAromaticHetero: return "saturated or aromatic heteroatom-containing";
    case RingQualifier::UnsaturatedCarbon: return "unsaturated non-aromatic carbon-only";
    case RingQualifier::UnsaturatedNitrogen: return "unsaturated non-aromatic nitrogen-containing";
    case RingQualifier::UnsaturatedHetero: return "unsaturated non-aromatic heteroatom-containing";
    case RingQualifier::Aromatic: return "aromatic";
    case RingQualifier::Heteroaromatic: return "hetero-aromatic";
  }
  return "any";
}

void parse_pattern(FingerprintBit& bit) {
  const std::string& p = bit.pattern;
  std::string symbol;
  auto flush_atom = [&] {
    if (symbol.empty()) throw ConfigError("path pattern '" + p + "' has an empty atom");
    PathAtom a;
    std::string canonical = symbol;
    if (std::islower(static_cast<unsigned char>(symbol[0]))) {
      a.aromatic = true;
      canonical[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(canonical[0])));
    }
    const auto* e = chem::find_element(canonical);
    if (e == nullptr) throw ConfigError("path pattern '" + p + "' has unknown element '" + symbol + "'");
    a.atomic_number = e->atomic_number;
    if (a.aromatic && a.atomic_number == chem::z::H) throw ConfigError("aromatic hydrogen in '" + p + "'");
    bit.atoms.push_back(a);
    symbol.clear();
  };
  for (char ch : p) {
    PathBond b;
    switch (ch) {
      case '-': b = PathBond::Single; break;
      case '=': b = PathBond::Double; break;
      case '#': b = PathBond::Triple; break;
      case ':': b = PathBond::Aromatic; break;
      case '~': b = PathBond::Any; break;
      default:
        if (!std::isalpha(static_cast<unsigned char>(ch))) {
          throw ConfigError("path pattern '" + p + "' has unexpected '" + std::string(1, ch) + "'");
        }
        symbol += ch;
        continue;
    }
    flush_atom();
    bit.bonds.push_back(b);
  }
  flush_atom();
  if (bit.atoms.size() < 2) throw ConfigError("path pattern '" + p + "' needs at least two atoms");
  for (std::size_t i = 0; i < bit.atoms.size(); ++i) {
    if (bit.atoms[i].atomic_number != chem::z::H) continue;
    const bool terminal = i == 0 || i + 1 == bit.atoms.size();
    if (!terminal || (bit.atoms.size() == 2 && bit.atoms[1 - i].atomic_number == chem::z::H)) {
      throw ConfigError("hydrogen must be a terminal atom in '" + p + "'");
    }
    const PathBond b = bit.bonds[i == 0 ? 0 : i - 1];
    if (b != PathBond::Single && b != PathBond::Any) {
      throw ConfigError("hydrogen must be singly bonded in '" + p + "'");
    }
  }
}

bool atom_matches(const chem::Atom& a, const PathAtom& p) {
  return a.atomic_number == p.atomic_number && (!p.aromatic || a.aromatic);
}

bool bond_matches(BondOrder o, PathBond p) {
  switch (p) {
    case PathBond::Single: return o == BondOrder::Single;
    case PathBond::Double: return o == BondOrder::Double;
    case PathBond::Triple: return o == BondOrder::Triple;
    case PathBond::Aromatic: return o == BondOrder::Aromatic;
    case PathBond::Any: return true;
  }
  return false;
}

struct RingFacts {
  int size;
  bool aromatic;
  bool saturated;
  bool carbon_only;
  bool has_nitrogen;
};

std::vector<RingFacts> ring_facts(const MolecularGraph& g) {
  std::vector<RingFacts> out;
  for (const auto& r : chem::minimum_cycle_basis(g)) {
    RingFacts f{r.size(), true, true, true, false};
    for (int a : r.atoms) {
      const auto& atom = g.atom(a);
      f.aromatic = f.aromatic && atom.aromatic;
      f.carbon_only = f.carbon_only && atom.atomic_number == chem::z::C;
      f.has_nitrogen = f.has_nitrogen || atom.atomic_number == chem::z::N;
    }
    for (int b : r.bonds) f.saturated = f.saturated && g.bond(b).order == BondOrder::Single;
    out.push_back(f);
  }
  return out;
}

bool ring_qualifies(const RingFacts& f, RingQualifier q) {
  const bool sat_or_arom = f.saturated || f.aromatic;
  const bool unsat = !f.saturated && !f.aromatic;
  switch (q) {
    case RingQualifier::Any: return true;
    case RingQualifier::SaturatedOrAromaticCarbon: return sat_or_arom && f.carbon_only;
    case RingQualifier::SaturatedOrAromaticNitrogen: return sat_or_arom && f.has_nitrogen;
    case RingQualifier::SaturatedOrAromaticHetero: return sat_or_arom && !f.carbon_only;
    case RingQualifier::UnsaturatedCarbon: return unsat && f.carbon_only;
    case RingQualifier::UnsaturatedNitrogen: return unsat && f.has_nitrogen;
    case RingQualifier::UnsaturatedHetero: return unsat && !f.carbon_only;
    case RingQualifier::Aromatic: return f.aromatic;
    case RingQualifier::Heteroaromatic: return f.aromatic && !f.carbon_only;
  }
  return false;
}

// Linear patterns drawn from the public substructure key list; H denotes an
// attached hydrogen.
constexpr std::string_view kPaths[] = {
    "C~H", "C~N", "C~O", "C~F", "C~Si", "C~P", "C~S", "C~Cl", "C~Br", "C~I", "N~H", "N~N", "N~O",
    "N~S", "O~H", "O~O", "O~P", "C=C", "C#C", "C=N", "C#N", "C=O", "C=S", "N=N", "N=O", "P=O",
    "S=O", "O=S=O", "C-O-C", "C-N-C", "C-S-C", "O=C-O", "O=C-N", "O=C-C-O", "O=C-C-N", "O=C-C=O",
    "O-C-C-O", "N-C-C-N", "O-C-C-N", "Cl-C-C-Cl", "O=N-O", "N#C-C", "Cl-C:C", "Br-C:C", "O-C:C",
    "N-C:C", "C-C:C", "C:C-C:C", "C:N:C", "N:C:N", "O=C-C:C", "C=C-C=C", "O=C-O-C", "O=C-N-C",
    "C-C-C-C-C", "C-C-C-C-C-C", "O-C-C-C-C-C-C-C", "C-C-C-C-C-C-C-C", "O=C-C-C-C-C-C-C",
    "O-C-C-C-C-C-O", "C:C:C:C:C:C", "H-N-N-H",
};

std::string default_text() {
  std::ostringstream out;
  out << kHeader << "\n";
  const std::pair<std::string_view, std::vector<int>> elements[] = {
      {"H", {4, 8, 16, 32}}, {"B", {1, 2}},       {"C", {2, 4, 8, 16, 32}}, {"N", {1, 2, 4, 8}},
      {"O", {1, 2, 4, 8, 16}}, {"F", {1, 2, 4}},   {"Si", {1, 2}},           {"P", {1, 2, 4}},
      {"S", {1, 2, 4, 8}},   {"Cl", {1, 2, 4, 8}}, {"Br", {1, 2, 4}},        {"I", {1, 2, 4}},
      {"Sc", {1}},           {"Sn", {1}},          {"Hg", {1}},
  };
  for (const auto& [sym, thresholds] : elements) {
    for (int t : thresholds) out << "element " << sym << " " << t << "\n";
  }
  const std::pair<int, int> ring_depth[] = {{3, 2}, {4, 2}, {5, 5}, {6, 5}, {7, 2}, {8, 2}, {9, 1}, {10, 1}};
  for (const auto& [size, depth] : ring_depth) {
    for (int m = 1; m <= depth; ++m) {
      for (int q = 0; q < 7; ++q) {
        out << "ring " << size << " " << m << " " << kQualifiers[static_cast<std::size_t>(q)].second << "\n";
      }
    }
  }
  for (int m = 1; m <= 4; ++m) {
    out << "ring 0 " << m << " aromatic\n";
    out << "ring 0 " << m << " heteroaromatic\n";
  }
  for (auto p : kPaths) out << "path " << p << "\n";
  return out.str();
}

}  // namespace

std::string FingerprintBit::name() const {
  switch (kind) {
    case Kind::Element:
      return ">= " + std::to_string(min_count) + " " + std::string(chem::element(atomic_number).symbol);
    case Kind::Ring:
      if (ring_size == 0) {
        return ">= " + std::to_string(min_count) + " " + qualifier_phrase(qualifier) + " ring" +
               (min_count > 1 ? "s" : "");
      }
      return ">= " + std::to_string(min_count) + " " + qualifier_phrase(qualifier) + " ring size " +
             std::to_string(ring_size);
    case Kind::Path:
      return pattern;
  }
  return pattern;
}

std::string FingerprintBit::line() const {
  switch (kind) {
    case Kind::Element:
      return "element " + std::string(chem::element(atomic_number).symbol) + " " + std::to_string(min_count);
    case Kind::Ring:
      return "ring " + std::to_string(ring_size) + " " + std::to_string(min_count) + " " +
             std::string(qualifier_token(qualifier));
    case Kind::Path:
      return "path " + pattern;
  }
  return {};
}

FingerprintBit FingerprintSpec::parse_line(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string kind;
  in >> kind;
  FingerprintBit bit;
  auto read_int = [&](const char* what) {
    int v = 0;
    if (!(in >> v)) throw ConfigError("fingerprint line '" + std::string(line) + "': missing " + what);
    return v;
  };
  if (kind == "element") {
    std::string sym;
    in >> sym;
    const auto* e = chem::find_element(sym);
    if (e == nullptr) throw ConfigError("fingerprint line '" + std::string(line) + "': unknown element");
    bit.kind = FingerprintBit::Kind::Element;
    bit.atomic_number = e->atomic_number;
    bit.min_count = read_int("count");
  } else if (kind == "ring") {
    bit.kind = FingerprintBit::Kind::Ring;
    bit.ring_size = read_int("size");
    bit.min_count = read_int("count");
    std::string q;
    in >> q;
    auto it = std::find_if(kQualifiers.begin(), kQualifiers.end(), [&](const auto& e) { return e.second == q; });
    if (it == kQualifiers.end()) throw ConfigError("fingerprint line '" + std::string(line) + "': bad qualifier");
    bit.qualifier = it->first;
    if (bit.ring_size != 0 && bit.ring_size < 3) {
      throw ConfigError("fingerprint line '" + std::string(line) + "': ring size must be 0 or >= 3");
    }
  } else if (kind == "path") {
    bit.kind = FingerprintBit::Kind::Path;
    in >> bit.pattern;
    parse_pattern(bit);
  } else {
    throw ConfigError("fingerprint line '" + std::string(line) + "': unknown kind '" + kind + "'");
  }
  if (bit.min_count < 1) throw ConfigError("fingerprint line '" + std::string(line) + "': count must be >= 1");
  std::string rest;
  if (in >> rest) throw ConfigError("fingerprint line '" + std::string(line) + "': trailing text");
  return bit;
}

FingerprintSpec FingerprintSpec::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw ConfigError("fingerprint spec header missing");
  std::vector<FingerprintBit> bits;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    bits.push_back(parse_line(line));
  }
  return FingerprintSpec(std::move(bits));
}

const FingerprintSpec& FingerprintSpec::default_spec() {
  static const FingerprintSpec spec = parse(default_text());
  return spec;
}

std::string FingerprintSpec::serialize() const {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& b : bits_) out += b.line() + "\n";
  return out;
}

std::vector<std::string> FingerprintSpec::names() const {
  std::vector<std::string> out;
  for (const auto& b : bits_) out.push_back(b.name());
  return out;
}

std::size_t FingerprintSpec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i].name() == name) return i;
  }
  throw Error("no fingerprint bit named '" + std::string(name) + "'");
}

bool path_matches(const MolecularGraph& g, const FingerprintBit& bit) {
  // Strip terminal hydrogens into "needs an attached H" flags.
  std::vector<PathAtom> atoms = bit.atoms;
  std::vector<PathBond> bonds = bit.bonds;
  bool need_h_front = false, need_h_back = false;
  if (atoms.front().atomic_number == chem::z::H) {
    need_h_front = true;
    atoms.erase(atoms.begin());
    bonds.erase(bonds.begin());
  }
  if (atoms.back().atomic_number == chem::z::H) {
    need_h_back = true;
    atoms.pop_back();
    bonds.pop_back();
  }
  const auto m = atoms.size();
  std::vector<int> path;
  std::vector<bool> used(static_cast<std::size_t>(g.atom_count()), false);
  std::function<bool(int)> extend = [&](int at) -> bool {
    if (path.size() == m) {
      if (need_h_back && g.atom(path.back()).hydrogens == 0) return false;
      return true;
    }
    for (const auto& nb : g.neighbors(at)) {
      if (used[nb.atom]) continue;
      if (!bond_matches(g.bond(nb.bond).order, bonds[path.size() - 1])) continue;
      if (!atom_matches(g.atom(nb.atom), atoms[path.size()])) continue;
      used[nb.atom] = true;
      path.push_back(nb.atom);
      const bool ok = extend(nb.atom);
      path.pop_back();
      used[nb.atom] = false;
      if (ok) return true;
    }
    return false;
  };
  for (int s = 0; s < g.atom_count(); ++s) {
    if (!atom_matches(g.atom(s), atoms.front())) continue;
    if (need_h_front && g.atom(s).hydrogens == 0) continue;
    // A lone heavy atom with H at both ends needs two hydrogens.
    if (m == 1 && need_h_front && need_h_back && g.atom(s).hydrogens < 2) continue;
    used[s] = true;
    path.assign(1, s);
    const bool ok = extend(s);
    used[s] = false;
    if (ok) return true;
  }
  return false;
}

BitVector compute_fingerprint(const MolecularGraph& g, const FingerprintSpec& spec) {
  BitVector out(spec.size());
  std::map<int, int> element_counts;
  int hydrogens = 0;
  for (const auto& a : g.atoms()) {
    ++element_counts[a.atomic_number];
    hydrogens += a.hydrogens;
  }
  element_counts[chem::z::H] += hydrogens;
  std::vector<RingFacts> rings;
  bool rings_ready = false;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& bit = spec.bits()[i];
    switch (bit.kind) {
      case FingerprintBit::Kind::Element:
        out.set(i, element_counts[bit.atomic_number] >= bit.min_count);
        break;
      case FingerprintBit::Kind::Ring: {
        if (!rings_ready) {
          rings = ring_facts(g);
          rings_ready = true;
        }
        int n = 0;
        for (const auto& f : rings) {
          if ((bit.ring_size == 0 || f.size == bit.ring_size) && ring_qualifies(f, bit.qualifier)) ++n;
        }
        out.set(i, n >= bit.min_count);
        break;
      }
      case FingerprintBit::Kind::Path:
        out.set(i, path_matches(g, bit));
        break;
    }
  }
  return out;
}

}  // namespace toxblend::featurize
