#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "test_support.hpp"
#include "toxblend/chem/smiles.hpp"
#include "toxblend/featurize/descriptors.hpp"
#include "toxblend/featurize/features.hpp"
#include "toxblend/featurize/fingerprint.hpp"
#include "toxblend/featurize/ngrams.hpp"
#include "toxblend/featurize/similarity.hpp"
#include "toxblend/log.hpp"

using namespace toxblend;
using namespace toxblend::featurize;
using chem::parse_smiles;

namespace {

double descriptor(std::string_view smiles, std::string_view name) {
  const auto& reg = DescriptorRegistry::pld_v1();
  const auto names = reg.names();
  const auto it = std::find(names.begin(), names.end(), name);
  EXPECT_NE(it, names.end()) << name;
  return compute_pld(parse_smiles(smiles), reg)[it - names.begin()];
}

bool bit(std::string_view smiles, std::string_view name) {
  const auto& spec = FingerprintSpec::default_spec();
  return compute_fingerprint(parse_smiles(smiles), spec).test(spec.index_of(name));
}

BitVector bits(std::initializer_list<int> v) {
  BitVector b(v.size());
  std::size_t i = 0;
  for (int x : v) b.set(i++, x != 0);
  return b;
}

// Brute-force path check: enumerate every simple path as an explicit
// sequence of (element, aromatic, bond) and compare against the pattern
// string in both directions.
bool path_exists_bruteforce(const chem::MolecularGraph& g, const std::string& pattern) {
  std::set<std::string> rendered;
  std::function<void(std::vector<int>&, std::string&)> walk = [&](std::vector<int>& path, std::string& text) {
    rendered.insert(text);
    for (const auto& nb : g.neighbors(path.back())) {
      if (std::find(path.begin(), path.end(), nb.atom) != path.end()) continue;
      const auto order = g.bond(nb.bond).order;
      const char bc = order == chem::BondOrder::Single   ? '-'
                      : order == chem::BondOrder::Double ? '='
                      : order == chem::BondOrder::Triple ? '#'
                                                          : ':';
      const auto saved = text.size();
      text += bc;
      text += std::string(g.atom(nb.atom).symbol());
      path.push_back(nb.atom);
      walk(path, text);
      path.pop_back();
      text.resize(saved);
    }
  };
  for (int s = 0; s < g.atom_count(); ++s) {
    std::vector<int> path{s};
    std::string text(g.atom(s).symbol());
    walk(path, text);
  }
  return rendered.count(pattern) > 0;
}

}  // namespace

TEST(Descriptors, Ethanol) {
  EXPECT_EQ(descriptor("CCO", "heavy_atom_count"), 3);
  EXPECT_EQ(descriptor("CCO", "bond_count"), 2);
  EXPECT_EQ(descriptor("CCO", "hbond_donors"), 1);
  EXPECT_EQ(descriptor("CCO", "hbond_acceptors"), 1);
  EXPECT_EQ(descriptor("CCO", "zagreb_index"), 6);
  EXPECT_NEAR(descriptor("CCO", "molecular_weight"), 2 * 12.011 + 6 * 1.008 + 15.999, 1e-9);
  EXPECT_NEAR(descriptor("CCO", "molecular_weight"), 46.069, 5e-4);
}

TEST(Descriptors, Topology) {
  EXPECT_EQ(descriptor("CCC", "wiener_number"), 4);
  // Path of 3: eccentricities 2,1,2; degrees 1,2,1.
  EXPECT_EQ(descriptor("CCC", "eccentric_connectivity"), 1 * 2 + 2 * 1 + 1 * 2);
  EXPECT_DOUBLE_EQ(descriptor("CCC", "petitjean_number"), 1.0);
  EXPECT_EQ(descriptor("C", "petitjean_number"), 0.0);
  EXPECT_EQ(descriptor("c1ccccc1", "petitjean_number"), 0.0);
  EXPECT_EQ(descriptor("CCCC", "rotatable_bonds"), 1);
  EXPECT_EQ(descriptor("c1ccccc1CC", "rotatable_bonds"), 1);
  EXPECT_EQ(descriptor("c1ccc2ccccc2c1", "ring_count"), 2);
  EXPECT_EQ(descriptor("C1CCCCCCC1", "largest_ring_size"), 8);
  EXPECT_EQ(descriptor("c1ccccc1", "aromatic_bond_count"), 6);
  EXPECT_EQ(descriptor("ClCBr", "halogen_count"), 2);
  EXPECT_NEAR(descriptor("CCO", "mannhold_logp"), 1.46 + 0.22 - 0.11, 1e-12);
}

TEST(Descriptors, RegistryRoundTrip) {
  const auto& reg = DescriptorRegistry::pld_v1();
  EXPECT_EQ(reg.size(), 18u);
  auto back = DescriptorRegistry::parse(reg.serialize());
  EXPECT_EQ(back.names(), reg.names());
  EXPECT_EQ(back.version(), "pld-v1");
  EXPECT_THROW(DescriptorRegistry::parse("# toxblend descriptor registry x\nnot_a_descriptor\n"), ConfigError);
  EXPECT_THROW(DescriptorRegistry::parse("# toxblend descriptor registry x\ntpsa\ntpsa\n"), ConfigError);
}

TEST(Descriptors, LargestFragmentOnly) {
  const auto& reg = DescriptorRegistry::pld_v1();
  EXPECT_EQ(compute_pld(parse_smiles("CCO.[Na+]"), reg), compute_pld(parse_smiles("CCO"), reg));
}

// Reference values from RDKit's MolWt and TPSA on the same SMILES.
TEST(Descriptors, MatchReferenceCorpus) {
  const auto& reg = DescriptorRegistry::pld_v1();
  const auto names = reg.names();
  const auto mw = std::find(names.begin(), names.end(), "molecular_weight") - names.begin();
  const auto tpsa = std::find(names.begin(), names.end(), "tpsa") - names.begin();
  int tpsa_mismatch = 0;
  for (const auto& row : test_support::read_tsv(test_support::data_path("nci500_reference.tsv"))) {
    const auto g = parse_smiles(row.at("smiles"));
    const Vector v = compute_pld(g, reg);
    for (Eigen::Index i = 0; i < v.size(); ++i) ASSERT_TRUE(std::isfinite(v[i])) << row.at("smiles");
    if (chem::connected_components(g).size() == 1) {
      EXPECT_NEAR(v[mw], std::stod(row.at("mol_wt")), 1e-3) << row.at("smiles");
    }
    if (std::abs(topological_psa(g) - std::stod(row.at("tpsa"))) > 0.006) {
      ++tpsa_mismatch;
      ADD_FAILURE() << row.at("smiles") << " tpsa " << topological_psa(g) << " vs " << row.at("tpsa");
    }
    (void)tpsa;
  }
  EXPECT_EQ(tpsa_mismatch, 0);
}

TEST(Descriptors, PermutationInvariant) {
  Rng rng(5);
  const auto& reg = DescriptorRegistry::pld_v1();
  for (std::string s : {"CC(=O)Oc1ccccc1C(=O)O", "c1ccc2c(c1)ccc1ccccc12", "OCC(O)CO"}) {
    const auto g = parse_smiles(s);
    const Vector base = compute_pld(g, reg);
    for (int i = 0; i < 10; ++i) {
      auto perm = test_support::random_permutation(g.atom_count(), rng);
      const Vector v = compute_pld(chem::permute_atoms(g, perm), reg);
      for (Eigen::Index k = 0; k < v.size(); ++k) EXPECT_NEAR(v[k], base[k], 1e-9) << s << " " << k;
    }
  }
}

TEST(Fingerprint, ElementThresholds) {
  EXPECT_TRUE(bit("CCCCCCCCCC", ">= 8 C"));
  EXPECT_FALSE(bit("CCCCCCCCCC", ">= 16 C"));
  EXPECT_TRUE(bit("CCCCCCCCCC", ">= 16 H"));
  EXPECT_FALSE(bit("CCCCCCCCCC", ">= 32 H"));
}

TEST(Fingerprint, Rings) {
  EXPECT_TRUE(bit("c1ccccc1", ">= 1 any ring size 6"));
  EXPECT_FALSE(bit("c1ccccc1", ">= 2 any ring size 6"));
  EXPECT_TRUE(bit("c1ccccc1", ">= 1 saturated or aromatic carbon-only ring size 6"));
  EXPECT_TRUE(bit("c1ccccc1", ">= 1 aromatic ring"));
  EXPECT_FALSE(bit("c1ccccc1", ">= 1 hetero-aromatic ring"));
  EXPECT_TRUE(bit("c1ccncc1", ">= 1 hetero-aromatic ring"));
  EXPECT_TRUE(bit("c1ccncc1", ">= 1 saturated or aromatic nitrogen-containing ring size 6"));
  EXPECT_TRUE(bit("C1=CCCCC1", ">= 1 unsaturated non-aromatic carbon-only ring size 6"));
  EXPECT_FALSE(bit("C1CCCCC1", ">= 1 unsaturated non-aromatic carbon-only ring size 6"));
  EXPECT_TRUE(bit("C1CCOCC1", ">= 1 saturated or aromatic heteroatom-containing ring size 6"));
  EXPECT_TRUE(bit("c1ccc2ccccc2c1", ">= 2 aromatic rings"));
}

TEST(Fingerprint, Paths) {
  EXPECT_TRUE(bit("OCC=O", "O=C-C-O"));
  EXPECT_TRUE(bit("O=CCO", "O=C-C-O"));
  EXPECT_FALSE(bit("OCCO", "O=C-C-O"));
  EXPECT_TRUE(bit("Clc1ccccc1", "Cl-C:C"));
  EXPECT_FALSE(bit("ClC=CC", "Cl-C:C"));
  EXPECT_TRUE(bit("CC", "C~H"));
  EXPECT_FALSE(bit("ClC(Cl)(Cl)Cl", "C~H"));
  EXPECT_TRUE(bit("NN", "H-N-N-H"));
  EXPECT_FALSE(bit("CN(C)N(C)C", "H-N-N-H"));
  EXPECT_TRUE(bit("CS(C)(=O)=O", "O=S=O"));
  EXPECT_TRUE(bit("CCCCCCCCO", "O-C-C-C-C-C-C-C"));
  EXPECT_FALSE(bit("CCCCCCO", "O-C-C-C-C-C-C-C"));
}

TEST(Fingerprint, PathsMatchBruteForce) {
  // Patterns without '~', lowercase, or H: rendering is exact.
  const auto& spec = FingerprintSpec::default_spec();
  int checked = 0;
  for (const auto& row : test_support::read_tsv(test_support::data_path("nci500_reference.tsv"))) {
    if (checked++ > 150) break;
    const auto g = parse_smiles(row.at("smiles"));
    if (g.atom_count() > 24) continue;
    for (const auto& b : spec.bits()) {
      if (b.kind != FingerprintBit::Kind::Path || b.pattern.find_first_of("~H") != std::string::npos) continue;
      std::string reversed;
      // Reverse the textual pattern atom by atom.
      std::vector<std::string> parts;
      std::string cur;
      for (char ch : b.pattern) {
        if (std::string("-=#:").find(ch) != std::string::npos) {
          parts.push_back(cur);
          parts.push_back(std::string(1, ch));
          cur.clear();
        } else {
          cur += ch;
        }
      }
      parts.push_back(cur);
      for (auto it = parts.rbegin(); it != parts.rend(); ++it) reversed += *it;
      const bool expected = path_exists_bruteforce(g, b.pattern) || path_exists_bruteforce(g, reversed);
      EXPECT_EQ(path_matches(g, b), expected) << row.at("smiles") << " " << b.pattern;
    }
  }
}

TEST(Fingerprint, SpecRoundTripAndErrors) {
  const auto& spec = FingerprintSpec::default_spec();
  EXPECT_GT(spec.size(), 200u);
  const auto text = spec.serialize();
  EXPECT_TRUE(text.starts_with("# toxblend fingerprint spec v1\n"));
  EXPECT_EQ(FingerprintSpec::parse(text).serialize(), text);
  std::set<std::string> names;
  for (const auto& n : spec.names()) EXPECT_TRUE(names.insert(n).second) << n;
  EXPECT_THROW(FingerprintSpec::parse_line("path O=C-Xx"), ConfigError);
  EXPECT_THROW(FingerprintSpec::parse_line("path C-H-C"), ConfigError);
  EXPECT_THROW(FingerprintSpec::parse_line("ring 2 1 any"), ConfigError);
  EXPECT_THROW(FingerprintSpec::parse_line("ring 6 1 weird"), ConfigError);
  EXPECT_THROW(FingerprintSpec::parse_line("element Qq 1"), ConfigError);
  EXPECT_THROW(FingerprintSpec::parse("element C 1\n"), ConfigError);
}

TEST(Fingerprint, PermutationInvariant) {
  Rng rng(9);
  const auto& spec = FingerprintSpec::default_spec();
  for (const auto& row : test_support::read_tsv(test_support::data_path("nci500_reference.tsv"))) {
    const auto g = parse_smiles(row.at("smiles"));
    auto perm = test_support::random_permutation(g.atom_count(), rng);
    EXPECT_EQ(compute_fingerprint(chem::permute_atoms(g, perm), spec), compute_fingerprint(g, spec));
  }
}

TEST(NGrams, Examples) {
  std::vector<std::string> corpus{"CCO"};
  auto vocab = build_ngram_vocabulary(corpus, 3, 1);
  EXPECT_EQ(vocab.terms(), (std::vector<std::string>{"C", "CC", "CCO", "CO", "O"}));
  auto counts = smiles_ngrams("CCO", vocab);
  std::map<std::string, double> named;
  for (auto [col, c] : counts) named[vocab.terms()[col]] = c;
  EXPECT_EQ(named, (std::map<std::string, double>{{"C", 2}, {"CC", 1}, {"CCO", 1}, {"CO", 1}, {"O", 1}}));
  EXPECT_TRUE(smiles_ngrams("", vocab).empty());

  std::vector<std::string> ring{"c1ccccc1"};
  auto rv = build_ngram_vocabulary(ring, 2, 1);
  double cc = 0;
  for (auto [col, c] : smiles_ngrams("c1ccccc1", rv)) {
    if (rv.terms()[col] == "cc") cc = c;
  }
  EXPECT_EQ(cc, 4);
}

TEST(NGrams, VocabularyBuild) {
  std::vector<std::string> corpus{"CC", "CC"};
  EXPECT_EQ(build_ngram_vocabulary(corpus, 2, 2).terms(), (std::vector<std::string>{"C", "CC"}));
  log::WarningCapture capture;
  EXPECT_EQ(build_ngram_vocabulary(corpus, 2, 5).size(), 0u);
  EXPECT_EQ(capture.warnings().size(), 1u);
  EXPECT_THROW(build_ngram_vocabulary(std::span<const std::string>{}, 2, 1), DataError);
}

TEST(NGrams, MatchBruteForceOnCorpus) {
  std::vector<std::string> corpus;
  for (const auto& row : test_support::read_tsv(test_support::data_path("nci500_reference.tsv"))) {
    corpus.push_back(row.at("smiles"));
  }
  std::vector<std::string> first(corpus.begin(), corpus.begin() + 100);
  auto vocab = build_ngram_vocabulary(first, 4, 5);
  // Every entry occurs at least min_count times.
  for (const auto& t : vocab.terms()) {
    int occ = 0;
    for (const auto& s : first) {
      for (std::size_t i = 0; i + t.size() <= s.size(); ++i) occ += s.compare(i, t.size(), t) == 0;
    }
    EXPECT_GE(occ, 5) << t;
  }
  for (const auto& s : corpus) {
    std::map<int, double> expected;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t n = 1; n <= 4 && i + n <= s.size(); ++n) {
        const int col = vocab.index(s.substr(i, n));
        if (col >= 0) expected[col] += 1;
      }
    }
    EXPECT_EQ(smiles_ngrams(s, vocab), SparseCounts(expected.begin(), expected.end())) << s;
  }
  auto back = NGramVocabulary::parse(vocab.serialize());
  EXPECT_EQ(back.terms(), vocab.terms());
  EXPECT_EQ(back.n_max(), 4);
  EXPECT_EQ(back.min_count(), 5);
}

TEST(Similarity, Examples) {
  std::vector<BitVector> train{bits({1, 1, 1})};
  EXPECT_NEAR(jaccard_knn_distance(bits({1, 0, 1}), train, 1), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(jaccard_knn_distance(bits({1, 1, 1}), train, 1), 0.0);
  EXPECT_EQ(jaccard_distance(bits({0, 0, 0}), bits({0, 0, 0})), 0.0);
  EXPECT_THROW(jaccard_knn_distance(bits({1}), std::span<const BitVector>{}, 1), DataError);
  EXPECT_THROW(jaccard_knn_distance(bits({1, 0, 1}), train, 2), DataError);
  EXPECT_EQ(complexity(bits({1, 0, 1})), 2);
  EXPECT_EQ(complexity(bits({0, 0, 0})), 0);
}

TEST(Similarity, KnnMatchesBruteForce) {
  Rng rng(21);
  auto random_bits = [&](std::size_t n) {
    BitVector b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, rng.bernoulli(0.3));
    return b;
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BitVector> train;
    for (int i = 0; i < 30; ++i) train.push_back(random_bits(20));
    const auto x = random_bits(20);
    std::vector<double> d;
    for (const auto& t : train) {
      int inter = 0, uni = 0;
      for (int i = 0; i < 20; ++i) {
        inter += x.test(i) && t.test(i);
        uni += x.test(i) || t.test(i);
      }
      d.push_back(uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / uni);
    }
    std::sort(d.begin(), d.end());
    const double expected = (d[0] + d[1] + d[2] + d[3] + d[4]) / 5.0;
    EXPECT_NEAR(jaccard_knn_distance(x, train, 5), expected, 1e-12);
  }
}

TEST(Similarity, MetricProperties) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    BitVector a(64), b(64);
    for (std::size_t i = 0; i < 64; ++i) {
      a.set(i, rng.bernoulli(0.2));
      b.set(i, rng.bernoulli(0.2));
    }
    EXPECT_EQ(jaccard_distance(a, a), 0.0);
    EXPECT_EQ(jaccard_distance(a, b), jaccard_distance(b, a));
    EXPECT_GE(jaccard_distance(a, b), 0.0);
    EXPECT_LE(jaccard_distance(a, b), 1.0);
  }
}

TEST(Similarity, ComplexityMatchesNaiveCount) {
  Rng rng(4);
  BitVector v(881);
  int naive = 0;
  for (std::size_t i = 0; i < 881; ++i) {
    const bool on = rng.bernoulli(0.4);
    v.set(i, on);
    naive += on;
  }
  EXPECT_EQ(complexity(v), naive);
  EXPECT_EQ(BitVector::from_string(v.to_string()), v);
}
