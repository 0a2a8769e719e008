#include "pplgec/mlm_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "pplgec/errors.hpp"
#include "pplgec/text.hpp"

namespace pplgec {

namespace {

constexpr std::string_view kModelHeader = "pplgec-ngram v1";

std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

bool is_masked(const MaskQuery& q, std::size_t pos) {
  return std::binary_search(q.masked_positions.begin(), q.masked_positions.end(), pos);
}

}  // namespace

void validate_query(const MaskQuery& q) {
  if (q.tokens.empty()) throw InvalidQuery("query has no tokens");
  if (q.masked_positions.empty()) throw InvalidQuery("query masks no position");
  if (q.masked_positions.size() != q.targets.size())
    throw InvalidQuery("masked_positions and targets differ in length");
  for (std::size_t i = 0; i < q.masked_positions.size(); ++i) {
    if (q.masked_positions[i] >= q.tokens.size())
      throw InvalidQuery("masked position " + std::to_string(q.masked_positions[i]) +
                         " out of range for " + std::to_string(q.tokens.size()) + " tokens");
    if (i && q.masked_positions[i] <= q.masked_positions[i - 1])
      throw InvalidQuery("masked positions must be strictly increasing");
  }
}

// ---------------------------------------------------------------------------
// UniformOracle

UniformOracle::UniformOracle(std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size == 0) throw DataError("uniform oracle needs a vocabulary size >= 1");
}

std::vector<MaskResponse> UniformOracle::query(std::span<const MaskQuery> batch) const {
  const double lp = -std::log(static_cast<double>(vocab_size_));
  std::vector<MaskResponse> out;
  out.reserve(batch.size());
  for (const auto& q : batch) {
    validate_query(q);
    out.push_back({std::vector<double>(q.masked_positions.size(), lp)});
  }
  return out;
}

std::string UniformOracle::model_id() const { return "uniform:" + std::to_string(vocab_size_); }

// ---------------------------------------------------------------------------
// NGramOracle

NGramOracle NGramOracle::train(std::istream& text, double add_k) {
  if (!(add_k > 0) || !std::isfinite(add_k)) throw DataError("add_k must be a positive number");

  std::vector<std::vector<std::string>> sentences;
  std::map<std::string, std::uint64_t> counts;
  for (std::string line; std::getline(text, line);) {
    auto words = split_whitespace(line);
    if (words.empty()) continue;
    for (auto& w : words) {
      w = fold_case(w);
      ++counts[w];
    }
    sentences.push_back(std::move(words));
  }
  if (sentences.empty()) throw EmptyTrainingData("training text contains no tokens");

  NGramOracle o;
  o.add_k_ = add_k;
  o.words_.emplace_back(kUnk);
  o.unigram_.push_back(counts.count(std::string(kUnk)) ? counts[std::string(kUnk)] : 0);
  for (const auto& [w, c] : counts) {
    if (w == kUnk) continue;
    o.words_.push_back(w);
    o.unigram_.push_back(c);
  }
  o.rebuild_index();
  for (auto c : o.unigram_) o.total_tokens_ += c;

  o.left_totals_.assign(o.words_.size(), 0);
  o.right_totals_.assign(o.words_.size(), 0);
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const Id a = o.id_of(s[i]);
      const Id b = o.id_of(s[i + 1]);
      ++o.bigrams_[pack(a, b)];
      ++o.left_totals_[a];
      ++o.right_totals_[b];
    }
  }
  return o;
}

void NGramOracle::rebuild_index() {
  ids_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], static_cast<Id>(i));
}

void NGramOracle::save(std::ostream& out) const {
  out << kModelHeader << '\n';
  std::ostringstream k;
  k.precision(17);
  k << add_k_;
  out << "add_k " << k.str() << '\n';
  out << "words " << words_.size() << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << unigram_[i] << '\n';
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(bigrams_.begin(), bigrams_.end());
  std::sort(pairs.begin(), pairs.end());
  out << "bigrams " << pairs.size() << '\n';
  for (const auto& [key, c] : pairs)
    out << (key >> 32) << '\t' << (key & 0xffffffffu) << '\t' << c << '\n';
  if (!out) throw Error("failed writing n-gram model");
}

NGramOracle NGramOracle::load(std::istream& in) {
  auto bad = [](const std::string& why) { return DataError("malformed n-gram model: " + why); };
  std::string line;
  if (!std::getline(in, line) || line != kModelHeader) throw bad("missing header");

  NGramOracle o;
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> o.add_k_) || tag != "add_k" || !(o.add_k_ > 0)) throw bad("add_k");
  if (!(in >> tag >> n) || tag != "words" || n == 0) throw bad("word count");
  std::getline(in, line);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw bad("truncated vocabulary");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw bad("vocabulary line");
    o.words_.push_back(line.substr(0, tab));
    o.unigram_.push_back(std::stoull(line.substr(tab + 1)));
  }
  if (o.words_.front() != kUnk) throw bad("first word must be " + std::string(kUnk));
  o.rebuild_index();
  for (auto c : o.unigram_) o.total_tokens_ += c;
  o.left_totals_.assign(n, 0);
  o.right_totals_.assign(n, 0);

  std::size_t m = 0;
  if (!(in >> tag >> m) || tag != "bigrams") throw bad("bigram count");
  for (std::size_t i = 0; i < m; ++i) {
    std::uint64_t a = 0, b = 0, c = 0;
    if (!(in >> a >> b >> c) || a >= n || b >= n) throw bad("bigram entry");
    o.bigrams_[pack(static_cast<Id>(a), static_cast<Id>(b))] = c;
    o.left_totals_[a] += c;
    o.right_totals_[b] += c;
  }
  return o;
}

NGramOracle NGramOracle::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open n-gram model " + path);
  return load(in);
}

NGramOracle::Id NGramOracle::id_of(std::string_view word) const {
  auto it = ids_.find(fold_case(word));
  return it == ids_.end() ? kUnkId : it->second;
}

std::uint64_t NGramOracle::pair_count(Id left, Id right) const {
  auto it = bigrams_.find(pack(left, right));
  return it == bigrams_.end() ? 0 : it->second;
}

double NGramOracle::unigram_prob(Id w) const {
  const double v = static_cast<double>(words_.size());
  return (static_cast<double>(unigram_[w]) + add_k_) /
         (static_cast<double>(total_tokens_) + add_k_ * v);
}

double NGramOracle::conditional(std::span<const std::string> tokens, std::size_t position,
                                std::string_view target, bool left_masked,
                                bool right_masked) const {
  if (position >= tokens.size())
    throw InvalidQuery("position " + std::to_string(position) + " out of range");
  const double v = static_cast<double>(words_.size());
  const Id w = id_of(target);

  double p_left = 0;
  if (position > 0 && !left_masked) {
    const Id prev = id_of(tokens[position - 1]);
    p_left = (static_cast<double>(pair_count(prev, w)) + add_k_) /
             (static_cast<double>(left_totals_[prev]) + add_k_ * v);
  } else {
    p_left = unigram_prob(w);
  }

  double p_right = 0;
  if (position + 1 < tokens.size() && !right_masked) {
    const Id next = id_of(tokens[position + 1]);
    p_right = (static_cast<double>(pair_count(w, next)) + add_k_) /
              (static_cast<double>(right_totals_[next]) + add_k_ * v);
  } else {
    p_right = unigram_prob(w);
  }
  return std::log(0.5 * p_left + 0.5 * p_right);
}

std::vector<MaskResponse> NGramOracle::query(std::span<const MaskQuery> batch) const {
  std::vector<MaskResponse> out;
  out.reserve(batch.size());
  for (const auto& q : batch) {
    validate_query(q);
    MaskResponse r;
    r.logprobs.reserve(q.masked_positions.size());
    for (std::size_t i = 0; i < q.masked_positions.size(); ++i) {
      const auto pos = q.masked_positions[i];
      const bool left_masked = pos > 0 && is_masked(q, pos - 1);
      const bool right_masked = is_masked(q, pos + 1);
      r.logprobs.push_back(conditional(q.tokens, pos, q.targets[i], left_masked, right_masked));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string NGramOracle::model_id() const {
  return "ngram:v" + std::to_string(words_.size()) + ":n" + std::to_string(total_tokens_);
}

std::uint64_t NGramOracle::unigram_count(std::string_view word) const {
  return unigram_[id_of(word)];
}

std::uint64_t NGramOracle::bigram_count(std::string_view left, std::string_view right) const {
  return pair_count(id_of(left), id_of(right));
}

std::uint64_t NGramOracle::left_total(std::string_view left) const {
  return left_totals_[id_of(left)];
}

std::uint64_t NGramOracle::right_total(std::string_view right) const {
  return right_totals_[id_of(right)];
}

double ngram_conditional(const NGramOracle& oracle, std::span<const std::string> tokens,
                         std::size_t position, std::string_view target, bool left_masked,
                         bool right_masked) {
  return oracle.conditional(tokens, position, target, left_masked, right_masked);
}

// ---------------------------------------------------------------------------
// CachingOracle

std::string cache_key(const MaskQuery& q) {
  std::string key;
  for (std::size_t i = 0; i < q.tokens.size(); ++i) {
    key += is_masked(q, i) ? std::string("\x1d") : q.tokens[i];
    key += '\x1f';
  }
  key += '\x1e';
  for (auto p : q.masked_positions) {
    key += std::to_string(p);
    key += '\x1f';
  }
  key += '\x1e';
  for (const auto& t : q.targets) {
    key += t;
    key += '\x1f';
  }
  return key;
}

CachingOracle::CachingOracle(std::shared_ptr<const MlmOracle> inner, std::size_t capacity)
    : inner_(std::move(inner)), capacity_(capacity) {
  if (!inner_) throw DataError("caching oracle needs an inner oracle");
  if (capacity_ == 0) throw DataError("cache capacity must be >= 1");
}

std::size_t CachingOracle::size() const {
  std::lock_guard lock(mu_);
  return lru_.size();
}

std::vector<MaskResponse> CachingOracle::query(std::span<const MaskQuery> batch) const {
  std::vector<MaskResponse> out(batch.size());
  std::vector<std::string> keys;
  keys.reserve(batch.size());
  for (const auto& q : batch) {
    validate_query(q);
    keys.push_back(cache_key(q));
  }

  // Unique misses in first-seen order, and which outputs each one fills.
  std::vector<MaskQuery> miss_queries;
  std::vector<std::vector<std::size_t>> miss_slots;
  {
    std::unordered_map<std::string_view, std::size_t> pending;
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (auto it = index_.find(keys[i]); it != index_.end()) {
        lru_.splice(lru_.begin(), lru_, it->second);
        out[i] = it->second->second;
        ++hits_;
        continue;
      }
      if (auto p = pending.find(keys[i]); p != pending.end()) {
        miss_slots[p->second].push_back(i);
        ++hits_;
        continue;
      }
      pending.emplace(keys[i], miss_queries.size());
      miss_queries.push_back(batch[i]);
      miss_slots.push_back({i});
      ++misses_;
    }
  }
  if (miss_queries.empty()) return out;

  auto fresh = inner_->query(miss_queries);
  if (fresh.size() != miss_queries.size())
    throw BackendUnavailable("oracle returned " + std::to_string(fresh.size()) +
                             " responses for " + std::to_string(miss_queries.size()) +
                             " queries");

  std::lock_guard lock(mu_);
  for (std::size_t m = 0; m < fresh.size(); ++m) {
    for (auto slot : miss_slots[m]) out[slot] = fresh[m];
    const auto& key = keys[miss_slots[m].front()];
    if (auto it = index_.find(key); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      continue;
    }
    lru_.emplace_front(key, std::move(fresh[m]));
    index_.emplace(lru_.front().first, lru_.begin());
    if (lru_.size() > capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
  }
  return out;
}

}  // namespace pplgec
