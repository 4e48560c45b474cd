#include "toxblend/eval/variability.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "toxblend/chem/writer.hpp"
#include "toxblend/rng.hpp"

namespace toxblend::eval {

RepeatMeasurements repeats_from_table(const dataset::AssayTable& t) {
  std::map<std::string, std::vector<int>> groups;
  for (int i = 0; i < t.molecule_count(); ++i) {
    groups[chem::canonical_smiles(t.graphs()[static_cast<std::size_t>(i)])].push_back(i);
  }
  RepeatMeasurements r;
  for (const auto& target : t.targets()) r.targets.push_back(target.name);
  r.outcomes.resize(r.targets.size());
  for (const auto& [key, rows] : groups) {
    for (int c = 0; c < t.target_count(); ++c) {
      std::vector<int> values;
      for (int row : rows) {
        const Label l = t.label(row, c);
        if (is_known(l)) values.push_back(l == Label::Active ? 1 : 0);
      }
      if (!values.empty()) r.outcomes[static_cast<std::size_t>(c)].push_back(std::move(values));
    }
  }
  return r;
}

std::optional<double> binary_auc(long n11, long n10, long n01, long n00) {
  // a = score, b = label; first index a, second b.
  const long pos = n11 + n01, neg = n10 + n00;
  if (pos == 0 || neg == 0) return std::nullopt;
  const double wins = static_cast<double>(n11) * static_cast<double>(n00);
  const double ties = static_cast<double>(n11) * static_cast<double>(n10) + static_cast<double>(n01) * static_cast<double>(n00);
  return (wins + 0.5 * ties) / (static_cast<double>(pos) * static_cast<double>(neg));
}

VariabilityResult variability_auc(const RepeatMeasurements& r, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (r.outcomes.size() != r.targets.size()) throw DataError("one outcome list per target expected");
  VariabilityResult res;
  int repeated_total = 0;
  double sum = 0.0;
  int defined = 0;
  for (std::size_t t = 0; t < r.outcomes.size(); ++t) {
    long fixed1 = 0, fixed0 = 0;
    int contradictory = 0;
    for (const auto& reps : r.outcomes[t]) {
      if (reps.empty()) throw DataError("a measurement list is empty");
      if (reps.size() < 2) continue;
      const bool all1 = std::all_of(reps.begin(), reps.end(), [](int v) { return v == 1; });
      const bool all0 = std::all_of(reps.begin(), reps.end(), [](int v) { return v == 0; });
      if (all1) ++fixed1;
      else if (all0) ++fixed0;
      else ++contradictory;
    }
    const long pairs = fixed1 + fixed0 + contradictory;
    repeated_total += static_cast<int>(pairs);
    res.contradictory_share.push_back(pairs > 0 ? static_cast<double>(contradictory) / static_cast<double>(pairs) : 0.0);
    if (pairs == 0) {
      res.per_target.push_back(std::nullopt);
      res.undefined_trials.push_back(0);
      continue;
    }
    Rng rng(derive_seed(seed, t));
    double acc = 0.0;
    int used = 0, undefined = 0;
    for (int k = 0; k < trials; ++k) {
      long n11 = fixed1, n00 = fixed0, n10 = 0, n01 = 0;
      for (int c = 0; c < contradictory; ++c) {
        const bool a = rng.bernoulli(0.5), b = rng.bernoulli(0.5);
        (a ? (b ? n11 : n10) : (b ? n01 : n00)) += 1;
      }
      if (const auto auc = binary_auc(n11, n10, n01, n00)) {
        acc += *auc;
        ++used;
      } else {
        ++undefined;
      }
    }
    res.undefined_trials.push_back(undefined);
    if (used == 0) {
      res.per_target.push_back(std::nullopt);
      continue;
    }
    res.per_target.push_back(acc / used);
    sum += acc / used;
    ++defined;
  }
  if (repeated_total == 0) throw DataError("no molecule/target pair has repeated measurements");
  res.mean = defined > 0 ? sum / defined : std::numeric_limits<double>::quiet_NaN();
  return res;
}

}  // namespace toxblend::eval
