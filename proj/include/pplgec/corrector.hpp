#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pplgec/confusion_registry.hpp"
#include "pplgec/mlm_oracle.hpp"
#include "pplgec/scoring_engine.hpp"

namespace pplgec {

struct Variant {
  std::string candidate;
  std::vector<std::string> tokens;
};

/// The sentence variants obtained by filling one slot with every word of a
/// confusion set, in registry order.
struct DataFlow {
  std::vector<std::string> base_tokens;
  std::size_t slot_index = 0;
  ErrorType error_type;
  std::vector<Variant> variants;
};

struct RankedEntry {
  std::string candidate;
  ScoreBreakdown score;
};

/// Ascending by ranking score, ties by candidate (byte order).
struct RankedList {
  std::vector<RankedEntry> entries;
};

struct Correction {
  std::size_t position = 0;
  ErrorType error_type;
  /// Absent when the slot held [MASK].
  std::optional<std::string> original_word;
  std::string predicted_word;
  bool changed = false;
  RankedList ranked;
};

/// Per-type fusion weights with a fallback for untuned types.
class AlphaTable {
 public:
  static constexpr double kDefaultAlpha = 0.5;

  AlphaTable() = default;
  explicit AlphaTable(double fallback);

  /// Lines `<type>: <alpha>`; `#` comments. Types must exist in the registry.
  static AlphaTable parse(std::istream& in, const ConfusionRegistry& registry);
  static AlphaTable parse_file(const std::string& path, const ConfusionRegistry& registry);

  void set(const ErrorType& type, double alpha);
  double at(const ErrorType& type) const;
  std::optional<double> explicit_value(const ErrorType& type) const;
  double fallback() const noexcept { return fallback_; }
  const std::map<ErrorType, double>& values() const noexcept { return per_type_; }

  void write(std::ostream& out) const;

 private:
  double fallback_ = kDefaultAlpha;
  std::map<ErrorType, double> per_type_;
};

/// Throws SlotOutOfRange or UnknownErrorType.
DataFlow build_dataflow(std::span<const std::string> tokens, std::size_t slot_index,
                        const ErrorType& error_type, const ConfusionRegistry& registry);

/// Candidate order for precomputed scores. Returns indices into `candidates`.
std::vector<std::size_t> rank_order(std::span<const std::string> candidates,
                                    std::span<const OrderScores> scores, ScorerMode mode,
                                    double alpha);

RankedList rank_candidates(const DataFlow& flow, const MlmOracle& oracle, double alpha,
                           ScorerMode mode = ScorerMode::Fused);

/// The slot may hold a word outside the set; only set members are ranked.
Correction correct(std::span<const std::string> tokens, std::size_t slot,
                   const ErrorType& error_type, const ConfusionRegistry& registry,
                   const MlmOracle& oracle, double alpha, ScorerMode mode = ScorerMode::Fused);

/// First min(k, |C|) words of the ranking. Throws DataError when k == 0.
std::vector<std::string> recommend_topk(std::span<const std::string> tokens, std::size_t slot,
                                        const ErrorType& error_type,
                                        const ConfusionRegistry& registry,
                                        const MlmOracle& oracle, double alpha, std::size_t k,
                                        ScorerMode mode = ScorerMode::Fused);

/// One Correction per (position, matched type), each judged against the
/// original sentence. Ordered by position, then registry type order.
std::vector<Correction> correct_text(std::span<const std::string> tokens,
                                     const ConfusionRegistry& registry, const MlmOracle& oracle,
                                     const AlphaTable& alphas);

/// Rewrites positions whose corrections all changed the word and agree on
/// the replacement; conflicting verdicts leave the word alone.
std::vector<std::string> apply_corrections(std::span<const std::string> tokens,
                                           std::span<const Correction> corrections);

}  // namespace pplgec
