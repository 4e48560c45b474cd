#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace toxblend::featurize {

/// (column, count) pairs sorted by column.
using SparseCounts = std::vector<std::pair<int, double>>;

/// Character substrings of SMILES, lengths 1..n_max, that occurred at least
/// min_count times in the training corpus. Columns follow lexicographic order.
class NGramVocabulary {
 public:
  NGramVocabulary() = default;
  NGramVocabulary(int n_max, int min_count, std::vector<std::string> terms);

  int n_max() const { return n_max_; }
  int min_count() const { return min_count_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  /// Column of a term, or -1.
  int index(std::string_view term) const;

  std::string serialize() const;
  static NGramVocabulary parse(std::string_view text);

 private:
  int n_max_ = 0;
  int min_count_ = 0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, int> index_;
};

NGramVocabulary build_ngram_vocabulary(std::span<const std::string> corpus, int n_max, int min_count);

SparseCounts smiles_ngrams(std::string_view text, const NGramVocabulary& vocab);

}  // namespace toxblend::featurize
