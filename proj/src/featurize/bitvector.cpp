#include "toxblend/featurize/bitvector.hpp"

#include <bit>

#include "toxblend/common.hpp"

namespace toxblend::featurize {

std::size_t BitVector::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::string BitVector::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

BitVector BitVector::from_string(std::string_view bits) {
  BitVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i);
    } else if (bits[i] != '0') {
      throw DataError("bit string contains '" + std::string(1, bits[i]) + "'");
    }
  }
  return v;
}

std::size_t intersection_count(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw Error("bit vector sizes differ");
  std::size_t n = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    n += static_cast<std::size_t>(std::popcount(a.words()[w] & b.words()[w]));
  }
  return n;
}

std::size_t union_count(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw Error("bit vector sizes differ");
  std::size_t n = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    n += static_cast<std::size_t>(std::popcount(a.words()[w] | b.words()[w]));
  }
  return n;
}

}  // namespace toxblend::featurize
