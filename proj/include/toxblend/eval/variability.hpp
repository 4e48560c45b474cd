#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toxblend/dataset/assay_table.hpp"

namespace toxblend::eval {

/// Repeated binary outcomes per (molecule, target) pair, grouped by target.
struct RepeatMeasurements {
  std::vector<std::string> targets;
  std::vector<std::vector<std::vector<int>>> outcomes;  // [target][pair] -> repeats (0/1)
};

/// Groups rows of a table by canonical SMILES; each known label is one repeat.
RepeatMeasurements repeats_from_table(const dataset::AssayTable& t);

struct VariabilityResult {
  std::vector<std::optional<double>> per_target;  // nullopt: no pair with repeats
  double mean = 0.0;                               // over defined targets
  std::vector<int> undefined_trials;               // trials where B had one class
  std::vector<double> contradictory_share;         // per target, among pairs with repeats
};

/// Expected AUC of predicting one pseudo-experiment with another. Per trial,
/// every pair with at least two repeats yields outcomes A and B: the shared
/// value if its repeats agree, independent fair coins otherwise. The trial
/// AUC scores A against labels B; trials where B holds one class are skipped.
VariabilityResult variability_auc(const RepeatMeasurements& r, int trials, std::uint64_t seed);

/// AUC of binary scores a against binary labels b from the 2x2 counts;
/// nullopt when b has one class.
std::optional<double> binary_auc(long n11, long n10, long n01, long n00);

}  // namespace toxblend::eval
