#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "toxblend/dataset/assay_table.hpp"

namespace toxblend::dataset {

enum class Fold : std::uint8_t { Train = 0, Valid = 1, Test = 2 };
enum class SplitStrategy { Index, Random, Scaffold };

std::string_view fold_name(Fold f);
std::string_view strategy_name(SplitStrategy s);
SplitStrategy parse_strategy(std::string_view name);

struct Fractions {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  /// Throws ConfigError unless all are >= 0 and they sum to 1.
  void validate() const;
  double of(Fold f) const { return f == Fold::Train ? train : f == Fold::Valid ? valid : test; }
};

struct SplitAssignment {
  std::vector<Fold> folds;  // one per molecule
  std::uint64_t seed = 0;
  SplitStrategy strategy = SplitStrategy::Index;

  std::vector<int> indices(Fold f) const;
  std::array<int, 3> counts() const;
};

/// Rows in natural order: floor(train*N), floor(valid*N), remainder.
SplitAssignment split_index(const AssayTable& t, const Fractions& f);
SplitAssignment split_random(const AssayTable& t, const Fractions& f, std::uint64_t seed);
/// Murcko-scaffold groups, largest first (equal sizes in seeded order), each
/// assigned whole to the fold furthest below its target count; train wins
/// ties, then valid.
SplitAssignment split_scaffold(const AssayTable& t, const Fractions& f, std::uint64_t seed);

SplitAssignment make_split(const AssayTable& t, SplitStrategy s, const Fractions& f, std::uint64_t seed);

}  // namespace toxblend::dataset
