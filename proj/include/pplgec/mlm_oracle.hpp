#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pplgec {

/// Word-level masked-LM query: log P(target_i | tokens with every masked
/// position hidden) for each masked position i.
struct MaskQuery {
  std::vector<std::string> tokens;
  std::vector<std::size_t> masked_positions;  // strictly increasing
  std::vector<std::string> targets;           // aligned with masked_positions
};

struct MaskResponse {
  std::vector<double> logprobs;  // natural log, one per masked position
};

/// Throws InvalidQuery unless positions are in range, strictly increasing,
/// non-empty and aligned with targets.
void validate_query(const MaskQuery& query);

/// Source of masked-word log-probabilities. Implementations are immutable
/// after construction and safe to query from several threads.
///
/// The contract is per word: backends working on subwords mask every piece
/// of a masked word jointly and report the summed piece log-probabilities.
class MlmOracle {
 public:
  virtual ~MlmOracle() = default;

  /// One response per query, in order.
  virtual std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const = 0;

  virtual std::string model_id() const = 0;

  /// Longest accepted sequence, when the backend has a limit.
  virtual std::optional<std::size_t> max_tokens() const { return std::nullopt; }
};

/// Every target gets -ln(vocab_size). Scores become analytically known.
class UniformOracle final : public MlmOracle {
 public:
  explicit UniformOracle(std::size_t vocab_size);

  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override;
  std::string model_id() const override;

  std::size_t vocab_size() const noexcept { return vocab_size_; }

 private:
  std::size_t vocab_size_;
};

/// Bidirectional add-k bigram model. The probability of word w at position t
/// mixes a left-context and a right-context estimate in equal parts:
///
///   P = 0.5 * P_L + 0.5 * P_R
///   P_L = (c(w[t-1], w) + k) / (sum_v c(w[t-1], v) + k*|V|)
///   P_R = (c(w, w[t+1]) + k) / (sum_v c(v, w[t+1]) + k*|V|)
///
/// A side whose neighbour is missing or masked falls back to the add-k
/// unigram (c(w) + k) / (N + k*|V|). Words are case folded; unseen words map
/// to the reserved UNK entry, which is part of |V|.
class NGramOracle final : public MlmOracle {
 public:
  static constexpr std::string_view kUnk = "<unk>";

  /// One sentence per line, whitespace tokenized; bigrams never cross lines.
  /// Throws EmptyTrainingData when no tokens are found, DataError when add_k <= 0.
  static NGramOracle train(std::istream& text, double add_k = 1.0);

  /// Reads the format produced by save().
  static NGramOracle load(std::istream& in);
  static NGramOracle load_file(const std::string& path);
  void save(std::ostream& out) const;

  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override;
  std::string model_id() const override;

  /// ln P(target at `position` | neighbours). tokens[position] is ignored.
  double conditional(std::span<const std::string> tokens, std::size_t position,
                     std::string_view target, bool left_masked, bool right_masked) const;

  double add_k() const noexcept { return add_k_; }
  /// Vocabulary size including UNK.
  std::size_t vocab_size() const noexcept { return words_.size(); }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::uint64_t unigram_count(std::string_view word) const;
  std::uint64_t bigram_count(std::string_view left, std::string_view right) const;
  /// sum_v c(left, v)
  std::uint64_t left_total(std::string_view left) const;
  /// sum_v c(v, right)
  std::uint64_t right_total(std::string_view right) const;

 private:
  using Id = std::uint32_t;
  static constexpr Id kUnkId = 0;

  Id id_of(std::string_view word) const;
  std::uint64_t pair_count(Id left, Id right) const;
  double unigram_prob(Id w) const;
  void rebuild_index();

  double add_k_ = 1.0;
  std::vector<std::string> words_;  // id -> word, words_[0] == kUnk
  std::unordered_map<std::string, Id> ids_;
  std::vector<std::uint64_t> unigram_;
  std::vector<std::uint64_t> left_totals_;
  std::vector<std::uint64_t> right_totals_;
  std::unordered_map<std::uint64_t, std::uint64_t> bigrams_;  // (left << 32 | right) -> count
  std::uint64_t total_tokens_ = 0;
};

/// Free-function form of NGramOracle::conditional.
double ngram_conditional(const NGramOracle& oracle, std::span<const std::string> tokens,
                         std::size_t position, std::string_view target, bool left_masked,
                         bool right_masked);

/// Get-or-compute LRU cache in front of another oracle. Keys are the token
/// sequence with masked positions blanked, the positions and the targets.
/// Concurrent misses on the same key may both reach the inner oracle.
class CachingOracle final : public MlmOracle {
 public:
  static constexpr std::size_t kDefaultCapacity = 1'000'000;

  explicit CachingOracle(std::shared_ptr<const MlmOracle> inner,
                         std::size_t capacity = kDefaultCapacity);

  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override;
  std::string model_id() const override { return inner_->model_id(); }
  std::optional<std::size_t> max_tokens() const override { return inner_->max_tokens(); }

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }
  std::size_t size() const;
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  using Entry = std::pair<std::string, MaskResponse>;

  std::shared_ptr<const MlmOracle> inner_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::list<Entry> lru_;  // front = most recent
  mutable std::unordered_map<std::string_view, std::list<Entry>::iterator> index_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

/// Key used by CachingOracle; exposed for tests.
std::string cache_key(const MaskQuery& query);

}  // namespace pplgec
