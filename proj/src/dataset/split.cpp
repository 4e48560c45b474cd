#include "toxblend/dataset/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "toxblend/chem/canonical.hpp"
#include "toxblend/chem/scaffold.hpp"
#include "toxblend/log.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::dataset {

std::string_view fold_name(Fold f) {
  switch (f) {
    case Fold::Train: return "train";
    case Fold::Valid: return "valid";
    case Fold::Test: return "test";
  }
  return "train";
}

std::string_view strategy_name(SplitStrategy s) {
  switch (s) {
    case SplitStrategy::Index: return "index";
    case SplitStrategy::Random: return "random";
    case SplitStrategy::Scaffold: return "scaffold";
  }
  return "index";
}

SplitStrategy parse_strategy(std::string_view name) {
  if (name == "index") return SplitStrategy::Index;
  if (name == "random") return SplitStrategy::Random;
  if (name == "scaffold") return SplitStrategy::Scaffold;
  throw ConfigError("unknown split strategy '" + std::string(name) + "'");
}

void Fractions::validate() const {
  if (train < 0 || valid < 0 || test < 0) throw ConfigError("split fractions must be non-negative");
  if (std::abs(train + valid + test - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
}

std::vector<int> SplitAssignment::indices(Fold f) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    if (folds[i] == f) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::array<int, 3> SplitAssignment::counts() const {
  std::array<int, 3> c{0, 0, 0};
  for (auto f : folds) ++c[static_cast<std::size_t>(f)];
  return c;
}

namespace {

void warn_empty_folds(const SplitAssignment& s) {
  const auto c = s.counts();
  for (std::size_t f = 0; f < 3; ++f) {
    if (c[f] == 0) {
      log::warn(std::string(strategy_name(s.strategy)) + " split left the " +
                std::string(fold_name(static_cast<Fold>(f))) + " fold empty");
    }
  }
}

SplitAssignment by_order(std::span<const int> order, const Fractions& f) {
  f.validate();
  const auto n = order.size();
  if (n < 3) throw DataError("need at least 3 molecules to split");
  const auto n_train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(n) + 1e-9));
  const auto n_valid = static_cast<std::size_t>(std::floor(f.valid * static_cast<double>(n) + 1e-9));
  SplitAssignment s;
  s.folds.assign(n, Fold::Test);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(order[i]);
    s.folds[row] = i < n_train ? Fold::Train : i < n_train + n_valid ? Fold::Valid : Fold::Test;
  }
  return s;
}

}  // namespace

SplitAssignment split_index(const AssayTable& t, const Fractions& f) {
  std::vector<int> order(static_cast<std::size_t>(t.molecule_count()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  auto s = by_order(order, f);
  s.strategy = SplitStrategy::Index;
  warn_empty_folds(s);
  return s;
}

SplitAssignment split_random(const AssayTable& t, const Fractions& f, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(t.molecule_count()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(std::span<int>(order));
  auto s = by_order(order, f);
  s.strategy = SplitStrategy::Random;
  s.seed = seed;
  warn_empty_folds(s);
  return s;
}

SplitAssignment split_scaffold(const AssayTable& t, const Fractions& f, std::uint64_t seed) {
  f.validate();
  const int n = t.molecule_count();
  if (n < 3) throw DataError("need at least 3 molecules to split");
  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    groups[chem::canonical_key(chem::murcko_scaffold(t.graphs()[static_cast<std::size_t>(i)])).value].push_back(i);
  }
  // Key order, then a seeded shuffle, then a stable size sort: equal-size
  // groups end up in seed-dependent order.
  std::vector<const std::vector<int>*> order;
  for (const auto& [key, members] : groups) order.push_back(&members);
  Rng rng(seed);
  rng.shuffle(std::span<const std::vector<int>*>(order));
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->size() > b->size(); });

  SplitAssignment s;
  s.folds.assign(static_cast<std::size_t>(n), Fold::Train);
  s.strategy = SplitStrategy::Scaffold;
  s.seed = seed;
  std::array<double, 3> fill{0, 0, 0};
  for (const auto* members : order) {
    std::size_t best = 0;
    double best_deficit = -1e300;
    for (std::size_t k = 0; k < 3; ++k) {
      const double deficit = f.of(static_cast<Fold>(k)) * n - fill[k];
      if (deficit > best_deficit + 1e-9) {
        best = k;
        best_deficit = deficit;
      }
    }
    for (int i : *members) s.folds[static_cast<std::size_t>(i)] = static_cast<Fold>(best);
    fill[best] += static_cast<double>(members->size());
  }
  warn_empty_folds(s);
  return s;
}

SplitAssignment make_split(const AssayTable& t, SplitStrategy s, const Fractions& f, std::uint64_t seed) {
  switch (s) {
    case SplitStrategy::Index: return split_index(t, f);
    case SplitStrategy::Random: return split_random(t, f, seed);
    case SplitStrategy::Scaffold: return split_scaffold(t, f, seed);
  }
  return split_index(t, f);
}

}  // namespace toxblend::dataset
