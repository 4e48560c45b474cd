#include "toxblend/featurize/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "toxblend/chem/elements.hpp"

namespace toxblend::featurize {

using chem::BondOrder;
using chem::MolecularGraph;

DescriptorContext::DescriptorContext(const MolecularGraph& graph) : g(chem::largest_fragment(graph)) {
  distance.reserve(static_cast<std::size_t>(g.atom_count()));
  for (int a = 0; a < g.atom_count(); ++a) distance.push_back(chem::bfs_distances(g, a));
  rings = chem::minimum_cycle_basis(g);
}

namespace {

bool polar(int z) { return z == chem::z::N || z == chem::z::O; }

double molecular_weight(const DescriptorContext& c) {
  double w = 0.0;
  for (const auto& a : c.g.atoms()) w += chem::element(a.atomic_number).mass + a.hydrogens * chem::element(1).mass;
  return w;
}

double heavy_atoms(const DescriptorContext& c) { return c.g.atom_count(); }
double bond_count(const DescriptorContext& c) { return c.g.bond_count(); }

double aromatic_atoms(const DescriptorContext& c) {
  return static_cast<double>(std::count_if(c.g.atoms().begin(), c.g.atoms().end(),
                                           [](const auto& a) { return a.aromatic; }));
}

double aromatic_bonds(const DescriptorContext& c) {
  return static_cast<double>(std::count_if(c.g.bonds().begin(), c.g.bonds().end(),
                                           [](const auto& b) { return b.order == BondOrder::Aromatic; }));
}

double hbond_donors(const DescriptorContext& c) {
  return static_cast<double>(std::count_if(c.g.atoms().begin(), c.g.atoms().end(), [](const auto& a) {
    return polar(a.atomic_number) && a.hydrogens > 0;
  }));
}

double hbond_acceptors(const DescriptorContext& c) {
  return static_cast<double>(std::count_if(c.g.atoms().begin(), c.g.atoms().end(),
                                           [](const auto& a) { return polar(a.atomic_number); }));
}

double rotatable_bonds(const DescriptorContext& c) {
  int n = 0;
  for (const auto& b : c.g.bonds()) {
    if (b.order == BondOrder::Single && !b.in_ring && c.g.atom(b.begin).degree >= 2 &&
        c.g.atom(b.end).degree >= 2) {
      ++n;
    }
  }
  return n;
}

double ring_count(const DescriptorContext& c) { return static_cast<double>(c.rings.size()); }

double largest_ring(const DescriptorContext& c) {
  int best = 0;
  for (const auto& r : c.rings) best = std::max(best, r.size());
  return best;
}

double zagreb(const DescriptorContext& c) {
  double s = 0.0;
  for (const auto& a : c.g.atoms()) s += a.degree * a.degree;
  return s;
}

double wiener(const DescriptorContext& c) {
  double s = 0.0;
  for (int i = 0; i < c.g.atom_count(); ++i) {
    for (int j = i + 1; j < c.g.atom_count(); ++j) s += std::max(0, c.distance[i][j]);
  }
  return s;
}

std::vector<int> eccentricities(const DescriptorContext& c) {
  std::vector<int> ecc;
  for (const auto& row : c.distance) ecc.push_back(*std::max_element(row.begin(), row.end()));
  return ecc;
}

double eccentric_connectivity(const DescriptorContext& c) {
  const auto ecc = eccentricities(c);
  double s = 0.0;
  for (int a = 0; a < c.g.atom_count(); ++a) s += c.g.atom(a).degree * ecc[a];
  return s;
}

double petitjean(const DescriptorContext& c) {
  if (c.g.atom_count() <= 1) return 0.0;
  const auto ecc = eccentricities(c);
  const int diameter = *std::max_element(ecc.begin(), ecc.end());
  const int radius = *std::min_element(ecc.begin(), ecc.end());
  if (radius == 0) return 0.0;
  return static_cast<double>(diameter - radius) / radius;
}

double mannhold_logp(const DescriptorContext& c) {
  int carbons = 0, hetero = 0;
  for (const auto& a : c.g.atoms()) {
    if (a.atomic_number == chem::z::C) {
      ++carbons;
    } else if (a.atomic_number != chem::z::H) {
      ++hetero;
    }
  }
  return 1.46 + 0.11 * carbons - 0.11 * hetero;
}

double tpsa(const DescriptorContext& c) { return topological_psa(c.g); }

double halogens(const DescriptorContext& c) {
  return static_cast<double>(std::count_if(c.g.atoms().begin(), c.g.atoms().end(),
                                           [](const auto& a) { return chem::is_halogen(a.atomic_number); }));
}

double rule_of_five(const DescriptorContext& c) {
  int v = 0;
  v += molecular_weight(c) > 500.0;
  v += mannhold_logp(c) > 5.0;
  v += hbond_donors(c) > 5.0;
  v += hbond_acceptors(c) > 10.0;
  return v;
}

const std::vector<Descriptor>& catalogue() {
  static const std::vector<Descriptor> all = {
      {"molecular_weight", molecular_weight},
      {"heavy_atom_count", heavy_atoms},
      {"bond_count", bond_count},
      {"aromatic_atom_count", aromatic_atoms},
      {"aromatic_bond_count", aromatic_bonds},
      {"hbond_donors", hbond_donors},
      {"hbond_acceptors", hbond_acceptors},
      {"rotatable_bonds", rotatable_bonds},
      {"ring_count", ring_count},
      {"largest_ring_size", largest_ring},
      {"zagreb_index", zagreb},
      {"wiener_number", wiener},
      {"eccentric_connectivity", eccentric_connectivity},
      {"petitjean_number", petitjean},
      {"mannhold_logp", mannhold_logp},
      {"tpsa", tpsa},
      {"halogen_count", halogens},
      {"rule_of_five_violations", rule_of_five},
  };
  return all;
}

constexpr std::string_view kHeader = "# toxblend descriptor registry ";

}  // namespace

// Ertl fragment contributions; unlisted environments fall back to a
// neighbour/hydrogen-count estimate.
double topological_psa(const MolecularGraph& g) {
  double total = 0.0;
  std::vector<bool> in_three_ring(static_cast<std::size_t>(g.atom_count()), false);
  for (const auto& r : chem::minimum_cycle_basis(g)) {
    if (r.size() == 3) {
      for (int a : r.atoms) in_three_ring[a] = true;
    }
  }
  for (int i = 0; i < g.atom_count(); ++i) {
    const auto& a = g.atom(i);
    if (!polar(a.atomic_number)) continue;
    int single = 0, dbl = 0, triple = 0, arom = 0;
    for (const auto& nb : g.neighbors(i)) {
      switch (g.bond(nb.bond).order) {
        case BondOrder::Single: ++single; break;
        case BondOrder::Double: ++dbl; break;
        case BondOrder::Triple: ++triple; break;
        case BondOrder::Aromatic: ++arom; break;
      }
    }
    const int nbrs = a.degree, h = a.hydrogens, chg = a.charge;
    double v = -1.0;
    if (a.atomic_number == chem::z::N) {
      if (nbrs == 1) {
        if (h == 0 && chg == 0 && triple == 1) v = 23.79;
        else if (h == 1 && chg == 0 && dbl == 1) v = 23.85;
        else if (h == 2 && chg == 0 && single == 1) v = 26.02;
        else if (h == 2 && chg == 1 && dbl == 1) v = 25.59;
        else if (h == 3 && chg == 1 && single == 1) v = 27.64;
      } else if (nbrs == 2) {
        if (h == 0 && chg == 0 && single == 1 && dbl == 1) v = 12.36;
        else if (h == 0 && chg == 0 && triple == 1 && dbl == 1) v = 13.60;
        else if (h == 1 && chg == 0 && single == 2) v = in_three_ring[i] ? 21.94 : 12.03;
        else if (h == 0 && chg == 1 && triple == 1 && single == 1) v = 4.36;
        else if (h == 1 && chg == 1 && dbl == 1 && single == 1) v = 13.97;
        else if (h == 2 && chg == 1 && single == 2) v = 16.61;
        else if (h == 0 && chg == 0 && arom == 2) v = 12.89;
        else if (h == 1 && chg == 0 && arom == 2) v = 15.79;
        else if (h == 1 && chg == 1 && arom == 2) v = 14.14;
      } else if (nbrs == 3) {
        if (h == 0 && chg == 0 && single == 3) v = in_three_ring[i] ? 3.01 : 3.24;
        else if (h == 0 && chg == 0 && single == 1 && dbl == 2) v = 11.68;
        else if (h == 0 && chg == 1 && single == 2 && dbl == 1) v = 3.01;
        else if (h == 1 && chg == 1 && single == 3) v = 4.44;
        else if (h == 0 && chg == 0 && arom == 3) v = 4.41;
        else if (h == 0 && chg == 0 && single == 1 && arom == 2) v = 4.93;
        else if (h == 0 && chg == 0 && dbl == 1 && arom == 2) v = 8.39;
        else if (h == 0 && chg == 1 && arom == 3) v = 4.10;
        else if (h == 0 && chg == 1 && single == 1 && arom == 2) v = 3.88;
      } else if (nbrs == 4) {
        if (h == 0 && chg == 1 && single == 4) v = 0.0;
      }
      if (v < 0.0) v = std::max(0.0, 30.5 - nbrs * 8.2 + h * 1.5);
    } else {
      if (nbrs == 1) {
        if (h == 0 && chg == 0 && dbl == 1) v = 17.07;
        else if (h == 1 && chg == 0 && single == 1) v = 20.23;
        else if (h == 0 && chg == -1 && single == 1) v = 23.06;
      } else if (nbrs == 2) {
        if (h == 0 && chg == 0 && single == 2) v = in_three_ring[i] ? 12.53 : 9.23;
        else if (h == 0 && chg == 0 && arom == 2) v = 13.14;
      }
      if (v < 0.0) v = std::max(0.0, 28.5 - nbrs * 8.6 + h * 1.5);
    }
    total += v;
  }
  return total;
}

DescriptorRegistry::DescriptorRegistry(std::string version, std::vector<Descriptor> descriptors)
    : version_(std::move(version)), descriptors_(std::move(descriptors)) {
  std::set<std::string> seen;
  for (const auto& d : descriptors_) {
    if (!seen.insert(d.name).second) throw ConfigError("duplicate descriptor '" + d.name + "'");
  }
}

const DescriptorRegistry& DescriptorRegistry::pld_v1() {
  static const DescriptorRegistry reg("pld-v1", catalogue());
  return reg;
}

std::vector<std::string> DescriptorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& d : descriptors_) out.push_back(d.name);
  return out;
}

std::string DescriptorRegistry::serialize() const {
  std::string out = std::string(kHeader) + version_ + "\n";
  for (const auto& d : descriptors_) out += d.name + "\n";
  return out;
}

DescriptorRegistry DescriptorRegistry::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kHeader)) {
    throw ConfigError("descriptor registry header missing");
  }
  std::string version = line.substr(kHeader.size());
  std::vector<Descriptor> ds;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto& all = catalogue();
    auto it = std::find_if(all.begin(), all.end(), [&](const Descriptor& d) { return d.name == line; });
    if (it == all.end()) {
      throw ConfigError("unknown descriptor '" + line + "' on line " + std::to_string(line_no));
    }
    ds.push_back(*it);
  }
  return DescriptorRegistry(std::move(version), std::move(ds));
}

std::vector<std::string> descriptor_catalogue() {
  std::vector<std::string> out;
  for (const auto& d : catalogue()) out.push_back(d.name);
  return out;
}

Vector compute_pld(const MolecularGraph& g, const DescriptorRegistry& reg) {
  const DescriptorContext ctx(g);
  Vector v(static_cast<Eigen::Index>(reg.size()));
  for (std::size_t i = 0; i < reg.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = ctx.g.empty() ? 0.0 : reg.descriptors()[i].fn(ctx);
  }
  return v;
}

}  // namespace toxblend::featurize
