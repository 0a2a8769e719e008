#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "pplgec/confusion_registry.hpp"
#include "pplgec/corpus_io.hpp"
#include "pplgec/mlm_oracle.hpp"

namespace httplib {
class Server;
}

namespace pplgec::testing {

/// Bigram reference that keeps only the raw training lines and recounts
/// everything from them on each call. Shares no code with NGramOracle.
class BruteNgram {
 public:
  BruteNgram(const std::string& training_text, double add_k);

  double conditional(const std::vector<std::string>& tokens, std::size_t pos,
                     const std::string& target, bool left_masked, bool right_masked) const;

  /// -(1/n) sum log P(w_t | mask{t})
  double first_order(const std::vector<std::string>& tokens) const;
  /// -(1/n) sum log SOR(t), mean-then-log for interior positions.
  double second_order(const std::vector<std::string>& tokens) const;

  std::size_t vocab_size() const { return vocab_.size() + 1; }

 private:
  std::string norm(const std::string& w) const;
  double unigram(const std::string& w) const;

  std::vector<std::vector<std::string>> lines_;
  std::set<std::string> vocab_;  // without UNK
  double k_;
};

/// Counts query traffic, then forwards.
class CountingOracle final : public MlmOracle {
 public:
  explicit CountingOracle(std::shared_ptr<const MlmOracle> inner) : inner_(std::move(inner)) {}
  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override;
  std::string model_id() const override { return inner_->model_id(); }

  std::size_t calls() const { return calls_; }
  std::size_t queries() const { return queries_; }
  std::size_t single_mask() const { return single_; }
  std::size_t double_mask() const { return double_; }
  /// Sum of masked positions over all queries.
  std::size_t point_queries() const { return points_; }

 private:
  std::shared_ptr<const MlmOracle> inner_;
  mutable std::atomic<std::size_t> calls_{0}, queries_{0}, single_{0}, double_{0}, points_{0};
};

/// Adds a constant to every logprob of the inner oracle.
class ShiftedOracle final : public MlmOracle {
 public:
  ShiftedOracle(std::shared_ptr<const MlmOracle> inner, double shift)
      : inner_(std::move(inner)), shift_(shift) {}
  std::vector<MaskResponse> query(std::span<const MaskQuery> batch) const override;
  std::string model_id() const override { return "shifted"; }

 private:
  std::shared_ptr<const MlmOracle> inner_;
  double shift_;
};

/// Deterministic random words w0..w{vocab-1}; `lines` sentences of 2..max_len tokens.
std::string random_text(std::uint64_t seed, std::size_t lines, std::size_t vocab,
                        std::size_t max_len);

/// Training text where every confusion word of every type sits between
/// its own left/right marker tokens, surrounded by filler words.
std::string planted_text(const ConfusionRegistry& registry, std::size_t lines, std::uint64_t seed);

/// Corpus with `per_type` samples of each registry type over random filler.
Corpus synthetic_corpus(const ConfusionRegistry& registry, std::size_t per_type,
                        std::uint64_t seed);

/// Local HTTP server speaking the oracle wire protocol, backed by `model`.
class FakeSidecar {
 public:
  FakeSidecar(std::shared_ptr<const MlmOracle> model, std::optional<std::size_t> max_tokens,
              std::size_t max_items = 32);
  ~FakeSidecar();

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t posts() const { return posts_; }
  std::size_t max_items_seen() const { return max_seen_; }
  std::size_t peak_concurrency() const { return peak_; }

  /// Respond with HTTP 500 from now on.
  void fail(bool on) { failing_ = on; }
  /// Stop advertising max_tokens in /v1/info while still enforcing it.
  void hide_limit() { hide_limit_ = true; }

 private:
  std::shared_ptr<const MlmOracle> model_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> posts_{0}, max_seen_{0}, active_{0}, peak_{0};
  std::atomic<bool> failing_{false};
  std::atomic<bool> hide_limit_{false};
};

/// A localhost port with nothing listening.
int closed_port();

}  // namespace pplgec::testing
