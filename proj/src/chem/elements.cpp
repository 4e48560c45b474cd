#include "toxblend/chem/elements.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace toxblend::chem {
namespace {

// Standard atomic weights (conventional values), index = atomic number - 1.
constexpr std::array<Element, 118> kElements{{
    {"H", 1, 1.0080},
    {"He", 2, 4.0030},
    {"Li", 3, 6.9410},
    {"Be", 4, 9.0120},
    {"B", 5, 10.8120},
    {"C", 6, 12.0110},
    {"N", 7, 14.0070},
    {"O", 8, 15.9990},
    {"F", 9, 18.9980},
    {"Ne", 10, 20.1800},
    {"Na", 11, 22.9900},
    {"Mg", 12, 24.3050},
    {"Al", 13, 26.9820},
    {"Si", 14, 28.0860},
    {"P", 15, 30.9740},
    {"S", 16, 32.0670},
    {"Cl", 17, 35.4530},
    {"Ar", 18, 39.9480},
    {"K", 19, 39.0980},
    {"Ca", 20, 40.0780},
    {"Sc", 21, 44.9560},
    {"Ti", 22, 47.8670},
    {"V", 23, 50.9440},
    {"Cr", 24, 51.9960},
    {"Mn", 25, 54.9380},
    {"Fe", 26, 55.8450},
    {"Co", 27, 58.9330},
    {"Ni", 28, 58.6930},
    {"Cu", 29, 63.5460},
    {"Zn", 30, 65.3900},
    {"Ga", 31, 69.7230},
    {"Ge", 32, 72.6100},
    {"As", 33, 74.9220},
    {"Se", 34, 78.9600},
    {"Br", 35, 79.9040},
    {"Kr", 36, 83.8000},
    {"Rb", 37, 85.4680},
    {"Sr", 38, 87.6200},
    {"Y", 39, 88.9060},
    {"Zr", 40, 91.2240},
    {"Nb", 41, 92.9060},
    {"Mo", 42, 95.9400},
    {"Tc", 43, 98.0000},
    {"Ru", 44, 101.0700},
    {"Rh", 45, 102.9060},
    {"Pd", 46, 106.4200},
    {"Ag", 47, 107.8680},
    {"Cd", 48, 112.4120},
    {"In", 49, 114.8180},
    {"Sn", 50, 118.7110},
    {"Sb", 51, 121.7600},
    {"Te", 52, 127.6000},
    {"I", 53, 126.9040},
    {"Xe", 54, 131.2900},
    {"Cs", 55, 132.9050},
    {"Ba", 56, 137.3280},
    {"La", 57, 138.9060},
    {"Ce", 58, 140.1160},
    {"Pr", 59, 140.9080},
    {"Nd", 60, 144.2400},
    {"Pm", 61, 145.0000},
    {"Sm", 62, 150.3600},
    {"Eu", 63, 151.9640},
    {"Gd", 64, 157.2500},
    {"Tb", 65, 158.9250},
    {"Dy", 66, 162.5000},
    {"Ho", 67, 164.9300},
    {"Er", 68, 167.2600},
    {"Tm", 69, 168.9340},
    {"Yb", 70, 173.0400},
    {"Lu", 71, 174.9670},
    {"Hf", 72, 178.4900},
    {"Ta", 73, 180.9480},
    {"W", 74, 183.8400},
    {"Re", 75, 186.2070},
    {"Os", 76, 190.2300},
    {"Ir", 77, 192.2170},
    {"Pt", 78, 195.0780},
    {"Au", 79, 196.9670},
    {"Hg", 80, 200.5900},
    {"Tl", 81, 204.3830},
    {"Pb", 82, 207.2000},
    {"Bi", 83, 208.9800},
    {"Po", 84, 209.0000},
    {"At", 85, 210.0000},
    {"Rn", 86, 222.0000},
    {"Fr", 87, 223.0000},
    {"Ra", 88, 226.0000},
    {"Ac", 89, 227.0000},
    {"Th", 90, 232.0380},
    {"Pa", 91, 231.0360},
    {"U", 92, 238.0290},
    {"Np", 93, 237.0000},
    {"Pu", 94, 244.0000},
    {"Am", 95, 243.0000},
    {"Cm", 96, 247.0000},
    {"Bk", 97, 247.0000},
    {"Cf", 98, 251.0000},
    {"Es", 99, 252.0000},
    {"Fm", 100, 257.0000},
    {"Md", 101, 258.0000},
    {"No", 102, 259.0000},
    {"Lr", 103, 262.0000},
    {"Rf", 104, 267.0000},
    {"Db", 105, 268.0000},
    {"Sg", 106, 269.0000},
    {"Bh", 107, 270.0000},
    {"Hs", 108, 269.0000},
    {"Mt", 109, 278.0000},
    {"Ds", 110, 281.0000},
    {"Rg", 111, 281.0000},
    {"Cn", 112, 285.0000},
    {"Nh", 113, 284.0000},
    {"Fl", 114, 289.0000},
    {"Mc", 115, 288.0000},
    {"Lv", 116, 293.0000},
    {"Ts", 117, 292.0000},
    {"Og", 118, 294.0000},
}};

}  // namespace

const Element* find_element(std::string_view symbol) {
  for (const auto& e : kElements) {
    if (e.symbol == symbol) return &e;
  }
  return nullptr;
}

const Element& element(int atomic_number) {
  if (atomic_number < 1 || atomic_number > static_cast<int>(kElements.size())) {
    throw std::out_of_range("atomic number out of range: " + std::to_string(atomic_number));
  }
  return kElements[static_cast<std::size_t>(atomic_number - 1)];
}

bool has_default_valence(int atomic_number) {
  switch (atomic_number) {
    case 1: case 3: case 4: case 5: case 6: case 7: case 8: case 9:
    case 11: case 12: case 13: case 14: case 15: case 16: case 17:
    case 19: case 20: case 32: case 33: case 34: case 35:
    case 37: case 38: case 52: case 53: case 55: case 56: case 85:
      return true;
    default:
      return false;
  }
}

}  // namespace toxblend::chem
