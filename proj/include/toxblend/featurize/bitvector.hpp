#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace toxblend::featurize {

/// Fixed-length bit set packed into 64-bit words.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }
  std::size_t count() const;
  std::span<const std::uint64_t> words() const { return words_; }

  /// "0101..." with bit 0 first.
  std::string to_string() const;
  static BitVector from_string(std::string_view bits);

  bool operator==(const BitVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

std::size_t intersection_count(const BitVector& a, const BitVector& b);
std::size_t union_count(const BitVector& a, const BitVector& b);

}  // namespace toxblend::featurize
