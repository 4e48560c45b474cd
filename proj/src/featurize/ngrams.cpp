#include "toxblend/featurize/ngrams.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "toxblend/common.hpp"
#include "toxblend/log.hpp"

namespace toxblend::featurize {
namespace {
constexpr std::string_view kHeader = "# toxblend ngram vocabulary v1";
}

NGramVocabulary::NGramVocabulary(int n_max, int min_count, std::vector<std::string> terms)
    : n_max_(n_max), min_count_(min_count), terms_(std::move(terms)) {
  if (!std::is_sorted(terms_.begin(), terms_.end())) throw DataError("vocabulary terms must be sorted");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].empty() || static_cast<int>(terms_[i].size()) > n_max_) {
      throw DataError("vocabulary term '" + terms_[i] + "' has invalid length");
    }
    if (!index_.emplace(terms_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

int NGramVocabulary::index(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? -1 : it->second;
}

std::string NGramVocabulary::serialize() const {
  std::ostringstream out;
  out << kHeader << "\n" << "n_max " << n_max_ << "\n" << "min_count " << min_count_ << "\n"
      << "terms " << terms_.size() << "\n";
  for (const auto& t : terms_) out << t << "\n";
  return out.str();
}

NGramVocabulary NGramVocabulary::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, key;
  if (!std::getline(in, line) || line != kHeader) throw DataError("ngram vocabulary header missing");
  int n_max = 0, min_count = 0;
  std::size_t count = 0;
  if (!(in >> key >> n_max) || key != "n_max") throw DataError("ngram vocabulary: expected n_max");
  if (!(in >> key >> min_count) || key != "min_count") throw DataError("ngram vocabulary: expected min_count");
  if (!(in >> key >> count) || key != "terms") throw DataError("ngram vocabulary: expected terms");
  std::getline(in, line);
  std::vector<std::string> terms;
  terms.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw DataError("ngram vocabulary truncated");
    terms.push_back(line);
  }
  return NGramVocabulary(n_max, min_count, std::move(terms));
}

NGramVocabulary build_ngram_vocabulary(std::span<const std::string> corpus, int n_max, int min_count) {
  if (corpus.empty()) throw DataError("empty corpus for ngram vocabulary");
  if (n_max < 1 || min_count < 1) throw ConfigError("n_max and min_count must be positive");
  std::map<std::string, int, std::less<>> counts;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int n = 1; n <= n_max && i + static_cast<std::size_t>(n) <= s.size(); ++n) {
        auto sub = std::string_view(s).substr(i, static_cast<std::size_t>(n));
        auto it = counts.find(sub);
        if (it == counts.end()) {
          counts.emplace(std::string(sub), 1);
        } else {
          ++it->second;
        }
      }
    }
  }
  std::vector<std::string> terms;
  for (const auto& [t, c] : counts) {
    if (c >= min_count) terms.push_back(t);
  }
  if (terms.empty()) log::warn("ngram vocabulary is empty (min_count " + std::to_string(min_count) + ")");
  return NGramVocabulary(n_max, min_count, std::move(terms));
}

SparseCounts smiles_ngrams(std::string_view text, const NGramVocabulary& vocab) {
  std::map<int, double> counts;
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (int n = 1; n <= vocab.n_max() && i + static_cast<std::size_t>(n) <= text.size(); ++n) {
      const int col = vocab.index(text.substr(i, static_cast<std::size_t>(n)));
      if (col >= 0) counts[col] += 1.0;
    }
  }
  return {counts.begin(), counts.end()};
}

}  // namespace toxblend::featurize
