#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxblend/chem/graph.hpp"
#include "toxblend/common.hpp"

namespace toxblend::chem {

enum class TokenKind { Atom, Bond, BranchOpen, BranchClose, RingClosure, Dot };

/// Bond symbols as written; '/' and '\' are kept apart from '-' only so the
/// lexemes round-trip, the parser treats all three as single bonds.
enum class BondSymbol { Single, Double, Triple, Aromatic, Up, Down };

struct Token {
  TokenKind kind = TokenKind::Atom;
  std::size_t offset = 0;
  std::string lexeme;

  // Atom tokens.
  int atomic_number = 0;
  bool aromatic = false;
  bool bracket = false;
  int charge = 0;
  /// Explicit H count of a bracket atom; -1 for organic-subset atoms.
  int hydrogens = -1;
  int isotope = 0;

  // Bond tokens.
  BondSymbol bond = BondSymbol::Single;

  // Ring-closure tokens.
  int ring_index = -1;

  std::string_view symbol() const;
};

class ParseError : public DataError {
 public:
  ParseError(std::string message, std::size_t offset);
  std::size_t offset() const { return offset_; }
  /// Message without the offset suffix, e.g. "unmatched ring closure".
  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
  std::size_t offset_;
};

/// Lexes SMILES into tokens. Concatenating the lexemes reproduces `text`.
/// Stereo marks inside brackets and atom classes are consumed and dropped.
std::vector<Token> tokenize_smiles(std::string_view text);

/// Parses SMILES into a graph with all fragments. Organic-subset atoms get
/// implicit hydrogens from the lowest fitting standard valence.
MolecularGraph parse_smiles(std::string_view text);

/// parse_smiles followed by largest_fragment: the molecule used for
/// featurization and scaffold grouping.
MolecularGraph parse_molecule(std::string_view text);

/// Standard valences for organic-subset elements, ascending. Empty if the
/// element is not in the organic subset.
std::span<const int> standard_valences(int atomic_number);

}  // namespace toxblend::chem
