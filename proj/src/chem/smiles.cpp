#include "toxblend/chem/smiles.hpp"

#include <array>
#include <cctype>
#include <map>
#include <optional>

#include "toxblend/chem/elements.hpp"

namespace toxblend::chem {

std::string_view Token::symbol() const {
  return atomic_number > 0 ? element(atomic_number).symbol : std::string_view{};
}

ParseError::ParseError(std::string message, std::size_t offset)
    : DataError(message + " at offset " + std::to_string(offset)),
      reason_(std::move(message)),
      offset_(offset) {}

std::span<const int> standard_valences(int atomic_number) {
  static constexpr std::array<int, 1> kB{3}, kC{4}, kN{3}, kO{2}, kHal{1};
  static constexpr std::array<int, 2> kP{3, 5};
  static constexpr std::array<int, 3> kS{2, 4, 6};
  switch (atomic_number) {
    case z::B: return kB;
    case z::C: return kC;
    case z::N: return kN;
    case z::O: return kO;
    case z::P: return kP;
    case z::S: return kS;
    case z::F:
    case z::Cl:
    case z::Br:
    case z::I: return kHal;
    default: return {};
  }
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) out.push_back(next());
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  Token make(TokenKind kind, std::size_t start) const {
    Token t;
    t.kind = kind;
    t.offset = start;
    t.lexeme = std::string(text_.substr(start, pos_ - start));
    return t;
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = peek();
    switch (c) {
      case '(': ++pos_; return make(TokenKind::BranchOpen, start);
      case ')': ++pos_; return make(TokenKind::BranchClose, start);
      case '.': ++pos_; return make(TokenKind::Dot, start);
      case '-': return bond(start, BondSymbol::Single);
      case '=': return bond(start, BondSymbol::Double);
      case '#': return bond(start, BondSymbol::Triple);
      case ':': return bond(start, BondSymbol::Aromatic);
      case '/': return bond(start, BondSymbol::Up);
      case '\\': return bond(start, BondSymbol::Down);
      case '[': return bracket_atom(start);
      case '%': {
        if (!is_digit(peek(1)) || !is_digit(peek(2))) {
          throw ParseError("malformed '%' ring closure", start);
        }
        pos_ += 3;
        Token t = make(TokenKind::RingClosure, start);
        t.ring_index = (text_[start + 1] - '0') * 10 + (text_[start + 2] - '0');
        return t;
      }
      default: break;
    }
    if (is_digit(c)) {
      ++pos_;
      Token t = make(TokenKind::RingClosure, start);
      t.ring_index = c - '0';
      return t;
    }
    return organic_atom(start);
  }

  Token bond(std::size_t start, BondSymbol symbol) {
    ++pos_;
    Token t = make(TokenKind::Bond, start);
    t.bond = symbol;
    return t;
  }

  Token organic_atom(std::size_t start) {
    const char c = peek();
    int z = 0;
    bool aromatic = false;
    std::size_t len = 1;
    switch (c) {
      case 'B':
        if (peek(1) == 'r') {
          z = z::Br;
          len = 2;
        } else {
          z = z::B;
        }
        break;
      case 'C':
        if (peek(1) == 'l') {
          z = z::Cl;
          len = 2;
        } else {
          z = z::C;
        }
        break;
      case 'N': z = z::N; break;
      case 'O': z = z::O; break;
      case 'P': z = z::P; break;
      case 'S': z = z::S; break;
      case 'F': z = z::F; break;
      case 'I': z = z::I; break;
      case 'b': z = z::B; aromatic = true; break;
      case 'c': z = z::C; aromatic = true; break;
      case 'n': z = z::N; aromatic = true; break;
      case 'o': z = z::O; aromatic = true; break;
      case 'p': z = z::P; aromatic = true; break;
      case 's': z = z::S; aromatic = true; break;
      default:
        throw ParseError(std::string("unknown symbol '") + c + "'", start);
    }
    pos_ += len;
    Token t = make(TokenKind::Atom, start);
    t.atomic_number = z;
    t.aromatic = aromatic;
    return t;
  }

  int read_number() {
    int v = 0;
    while (is_digit(peek())) v = v * 10 + (text_[pos_++] - '0');
    return v;
  }

  Token bracket_atom(std::size_t start) {
    ++pos_;  // '['
    Token t;
    t.bracket = true;
    t.hydrogens = 0;
    if (is_digit(peek())) t.isotope = read_number();

    // Element symbol: aromatic two-letter forms first, then the usual
    // uppercase(+lowercase) form, preferring the two-letter element.
    const std::size_t sym_at = pos_;
    static constexpr std::array<std::pair<std::string_view, int>, 3> kAromatic2{
        {{"se", z::Se}, {"as", 33}, {"te", 52}}};
    bool matched = false;
    for (const auto& [sym, z] : kAromatic2) {
      if (text_.substr(pos_, 2) == sym) {
        t.atomic_number = z;
        t.aromatic = true;
        pos_ += 2;
        matched = true;
        break;
      }
    }
    if (!matched) {
      const char c = peek();
      if (std::isupper(static_cast<unsigned char>(c))) {
        const Element* e = nullptr;
        if (std::islower(static_cast<unsigned char>(peek(1)))) {
          e = find_element(text_.substr(pos_, 2));
          if (e) pos_ += 2;
        }
        if (!e) {
          e = find_element(text_.substr(pos_, 1));
          if (e) pos_ += 1;
        }
        if (!e) throw ParseError("unknown element in bracket atom", sym_at);
        t.atomic_number = e->atomic_number;
      } else if (c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's') {
        t.atomic_number = find_element(std::string(1, static_cast<char>(std::toupper(c))))
                              ->atomic_number;
        t.aromatic = true;
        ++pos_;
      } else if (c == '\0') {
        throw ParseError("unterminated bracket atom", start);
      } else {
        throw ParseError(std::string("unknown symbol '") + c + "' in bracket atom", sym_at);
      }
    }

    // Chirality (discarded): '@', '@@', '@TH1', '@SP2', ...
    while (peek() == '@') ++pos_;
    if (std::isupper(static_cast<unsigned char>(peek())) &&
        std::isupper(static_cast<unsigned char>(peek(1))) && is_digit(peek(2))) {
      pos_ += 2;
      read_number();
    }
    if (peek() == 'H') {
      ++pos_;
      t.hydrogens = is_digit(peek()) ? read_number() : 1;
    }
    if (peek() == '+' || peek() == '-') {
      const char sign = text_[pos_++];
      int magnitude = 1;
      if (is_digit(peek())) {
        magnitude = read_number();
      } else {
        while (peek() == sign) {
          ++magnitude;
          ++pos_;
        }
      }
      t.charge = sign == '+' ? magnitude : -magnitude;
    }
    if (peek() == ':') {
      ++pos_;
      if (!is_digit(peek())) throw ParseError("malformed atom class", pos_);
      read_number();
    }
    if (pos_ >= text_.size()) throw ParseError("unterminated bracket atom", start);
    if (peek() != ']') {
      throw ParseError(std::string("unexpected '") + peek() + "' in bracket atom", pos_);
    }
    ++pos_;
    Token out = make(TokenKind::Atom, start);
    out.atomic_number = t.atomic_number;
    out.aromatic = t.aromatic;
    out.bracket = true;
    out.charge = t.charge;
    out.hydrogens = t.hydrogens;
    out.isotope = t.isotope;
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

BondOrder to_order(BondSymbol s) {
  switch (s) {
    case BondSymbol::Double: return BondOrder::Double;
    case BondSymbol::Triple: return BondOrder::Triple;
    case BondSymbol::Aromatic: return BondOrder::Aromatic;
    default: return BondOrder::Single;
  }
}

struct RingOpen {
  int atom;
  std::optional<BondSymbol> bond;
  std::size_t offset;
};

struct PendingBond {
  BondSymbol symbol;
  std::size_t offset;
};

// Implicit hydrogens for an organic-subset atom. Aromatic b/c/n/p reserve
// one valence for the delocalised pi bond; aromatic o/s contribute a lone
// pair and take none.
int implicit_hydrogens(const Atom& atom, int valence, std::size_t offset) {
  const auto allowed = standard_valences(atom.atomic_number);
  if (atom.aromatic) {
    const bool pi = atom.atomic_number != z::O && atom.atomic_number != z::S;
    const int used = valence + (pi ? 1 : 0);
    for (int v : allowed) {
      if (v >= used) return v - used;
    }
    return 0;
  }
  for (int v : allowed) {
    if (v >= valence) return v - valence;
  }
  throw ParseError("valence impossible for " + std::string(atom.symbol()), offset);
}

}  // namespace

std::vector<Token> tokenize_smiles(std::string_view text) { return Lexer(text).run(); }

MolecularGraph parse_smiles(std::string_view text) {
  if (text.empty()) throw ParseError("empty SMILES", 0);
  const auto tokens = tokenize_smiles(text);

  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::size_t> atom_offsets;
  std::vector<bool> organic;
  std::vector<int> branch_stack;
  std::vector<std::size_t> branch_offsets;
  std::map<int, RingOpen> open_rings;
  std::optional<PendingBond> pending;
  int prev = -1;

  auto add_bond = [&](int a, int b, std::optional<BondSymbol> symbol, std::size_t offset) {
    for (const auto& existing : bonds) {
      if ((existing.begin == a && existing.end == b) || (existing.begin == b && existing.end == a)) {
        throw ParseError("duplicate bond", offset);
      }
    }
    if (a == b) throw ParseError("ring closure to the same atom", offset);
    BondOrder order;
    if (symbol) {
      order = to_order(*symbol);
    } else {
      order = atoms[a].aromatic && atoms[b].aromatic ? BondOrder::Aromatic : BondOrder::Single;
    }
    bonds.push_back({a, b, order, false});
  };

  for (const auto& tok : tokens) {
    switch (tok.kind) {
      case TokenKind::Atom: {
        Atom atom;
        atom.atomic_number = tok.atomic_number;
        atom.aromatic = tok.aromatic;
        atom.charge = tok.charge;
        atom.isotope = tok.isotope;
        atom.hydrogens = tok.bracket ? tok.hydrogens : 0;
        const int idx = static_cast<int>(atoms.size());
        atoms.push_back(atom);
        atom_offsets.push_back(tok.offset);
        organic.push_back(!tok.bracket);
        if (prev >= 0) {
          add_bond(prev, idx, pending ? std::optional(pending->symbol) : std::nullopt, tok.offset);
        } else if (pending) {
          throw ParseError("bond without preceding atom", pending->offset);
        }
        pending.reset();
        prev = idx;
        break;
      }
      case TokenKind::Bond:
        if (pending) throw ParseError("consecutive bond symbols", tok.offset);
        if (prev < 0) throw ParseError("bond without preceding atom", tok.offset);
        pending = PendingBond{tok.bond, tok.offset};
        break;
      case TokenKind::BranchOpen:
        if (prev < 0) throw ParseError("branch without preceding atom", tok.offset);
        if (pending) throw ParseError("bond before branch", pending->offset);
        branch_stack.push_back(prev);
        branch_offsets.push_back(tok.offset);
        break;
      case TokenKind::BranchClose:
        if (branch_stack.empty()) throw ParseError("unmatched ')'", tok.offset);
        if (pending) throw ParseError("dangling bond", pending->offset);
        prev = branch_stack.back();
        branch_stack.pop_back();
        branch_offsets.pop_back();
        break;
      case TokenKind::RingClosure: {
        if (prev < 0) throw ParseError("ring closure without preceding atom", tok.offset);
        auto it = open_rings.find(tok.ring_index);
        const std::optional<BondSymbol> here =
            pending ? std::optional(pending->symbol) : std::nullopt;
        if (it == open_rings.end()) {
          open_rings.emplace(tok.ring_index, RingOpen{prev, here, tok.offset});
        } else {
          std::optional<BondSymbol> symbol = it->second.bond;
          if (here) {
            if (symbol && to_order(*symbol) != to_order(*here)) {
              throw ParseError("conflicting ring closure bonds", tok.offset);
            }
            symbol = here;
          }
          add_bond(it->second.atom, prev, symbol, tok.offset);
          open_rings.erase(it);
        }
        pending.reset();
        break;
      }
      case TokenKind::Dot:
        if (pending) throw ParseError("dangling bond", pending->offset);
        prev = -1;
        break;
    }
  }
  if (pending) throw ParseError("dangling bond", pending->offset);
  if (!branch_stack.empty()) throw ParseError("unclosed branch", text.size());
  if (!open_rings.empty()) {
    throw ParseError("unmatched ring closure", open_rings.begin()->second.offset);
  }

  std::vector<int> valence(atoms.size(), 0);
  for (const auto& b : bonds) {
    valence[b.begin] += bond_valence(b.order);
    valence[b.end] += bond_valence(b.order);
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (organic[i]) atoms[i].hydrogens = implicit_hydrogens(atoms[i], valence[i], atom_offsets[i]);
  }
  return MolecularGraph(std::move(atoms), std::move(bonds));
}

MolecularGraph parse_molecule(std::string_view text) { return largest_fragment(parse_smiles(text)); }

}  // namespace toxblend::chem
