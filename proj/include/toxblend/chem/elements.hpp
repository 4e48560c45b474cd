#pragma once

#include <string_view>

namespace toxblend::chem {

struct Element {
  std::string_view symbol;
  int atomic_number;
  double mass;
};

/// Exact, case-sensitive symbol lookup ("Cl", not "cl"). nullptr if unknown.
const Element* find_element(std::string_view symbol);

const Element& element(int atomic_number);

namespace z {
inline constexpr int H = 1, B = 5, C = 6, N = 7, O = 8, F = 9, Si = 14, P = 15, S = 16, Cl = 17,
                     Se = 34, Br = 35, I = 53;
}

/// Main-group elements with a conventional valence; metals outside this set
/// are left uncapped when a scaffold strips their neighbours.
bool has_default_valence(int atomic_number);

inline bool is_halogen(int atomic_number) {
  return atomic_number == z::F || atomic_number == z::Cl || atomic_number == z::Br ||
         atomic_number == z::I;
}

}  // namespace toxblend::chem
