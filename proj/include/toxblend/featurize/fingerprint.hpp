#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "toxblend/chem/graph.hpp"
#include "toxblend/featurize/bitvector.hpp"

namespace toxblend::featurize {

enum class RingQualifier {
  Any,
  SaturatedOrAromaticCarbon,
  SaturatedOrAromaticNitrogen,
  SaturatedOrAromaticHetero,
  UnsaturatedCarbon,
  UnsaturatedNitrogen,
  UnsaturatedHetero,
  Aromatic,
  Heteroaromatic,
};

enum class PathBond { Single, Double, Triple, Aromatic, Any };

struct PathAtom {
  int atomic_number = 0;
  bool aromatic = false;  // lowercase in the pattern
};

/// One fingerprint bit. Text forms, one per line:
///   element <symbol> <min>        at least min atoms (H counts attached hydrogens)
///   ring <size|0> <min> <qual>    at least min rings of that size (0 = any size)
///   path <pattern>                linear path, e.g. O=C-C-O or Cl-c:c
struct FingerprintBit {
  enum class Kind { Element, Ring, Path };

  Kind kind = Kind::Element;
  int atomic_number = 0;
  int min_count = 1;
  int ring_size = 0;
  RingQualifier qualifier = RingQualifier::Any;
  std::string pattern;
  std::vector<PathAtom> atoms;
  std::vector<PathBond> bonds;

  std::string name() const;
  std::string line() const;
};

/// Ordered bit definitions with a versioned text format whose first line is
/// "# toxblend fingerprint spec v1".
class FingerprintSpec {
 public:
  FingerprintSpec() = default;
  explicit FingerprintSpec(std::vector<FingerprintBit> bits) : bits_(std::move(bits)) {}

  static const FingerprintSpec& default_spec();
  static FingerprintSpec parse(std::string_view text);
  static FingerprintBit parse_line(std::string_view line);
  std::string serialize() const;

  std::size_t size() const { return bits_.size(); }
  const std::vector<FingerprintBit>& bits() const { return bits_; }
  std::vector<std::string> names() const;
  /// Index of the bit with the given display name; throws if absent.
  std::size_t index_of(std::string_view name) const;

 private:
  std::vector<FingerprintBit> bits_;
};

BitVector compute_fingerprint(const chem::MolecularGraph& g, const FingerprintSpec& spec);

/// True iff some simple path in g matches the bit's path pattern.
bool path_matches(const chem::MolecularGraph& g, const FingerprintBit& bit);

}  // namespace toxblend::featurize
