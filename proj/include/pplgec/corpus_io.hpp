#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pplgec/confusion_registry.hpp"

namespace pplgec {

inline constexpr std::string_view kMaskToken = "[MASK]";

/// One evaluation instance: a sentence with a single [MASK] slot, the word
/// that belongs there, and its error type.
struct Sample {
  std::vector<std::string> tokens;
  std::string answer;
  ErrorType error_type;

  /// Index of the [MASK] token. Assumes a valid sample.
  std::size_t slot() const;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Corpus {
  std::vector<Sample> samples;
  /// Free text; written as leading `#` lines, one per provenance line.
  std::string provenance;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct CorpusStats {
  std::vector<std::pair<ErrorType, std::size_t>> per_type;
  std::size_t total = 0;
};

/// Checks the Sample invariants. `row` is used in error messages.
void validate_sample(const Sample& sample, const ConfusionRegistry& registry, std::size_t row);

/// Reads the 3-column TSV corpus (sentence, answer, error type).
/// Rows are rejected with their line number on the first violation.
Corpus parse_corpus(std::istream& in, const ConfusionRegistry& registry);
Corpus parse_corpus_file(const std::string& path, const ConfusionRegistry& registry);

void write_corpus(const Corpus& corpus, std::ostream& out);

/// Per error type, how many samples to mine. Types not listed get 0.
using Quota = std::map<ErrorType, std::size_t>;

/// Mines samples from raw text (one sentence per line). For every type,
/// (sentence, occurrence) pairs are visited in a seeded uniform random order
/// and the first occurrence drawn from each not-yet-used sentence is masked,
/// until the quota is met. Output is grouped by type in registry order and
/// sorted by source line within a type.
Corpus build_corpus(std::istream& raw, const ConfusionRegistry& registry, const Quota& quota,
                    std::uint64_t seed);

/// Counts only the types present in the corpus, in first-seen order.
CorpusStats corpus_stats(const Corpus& corpus);
/// Counts every registry type, zeros included, in registry order.
CorpusStats corpus_stats(const Corpus& corpus, const ConfusionRegistry& registry);

std::string format_stats_table(const CorpusStats& stats);

}  // namespace pplgec
