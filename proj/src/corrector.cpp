#include "pplgec/corrector.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "pplgec/corpus_io.hpp"
#include "pplgec/errors.hpp"
#include "pplgec/text.hpp"

namespace pplgec {

// ---------------------------------------------------------------------------
// AlphaTable

AlphaTable::AlphaTable(double fallback) : fallback_(fallback) { check_alpha(fallback); }

AlphaTable AlphaTable::parse(std::istream& in, const ConfusionRegistry& registry) {
  AlphaTable table;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw LineError("expected '<error_type>: <alpha>'", lineno);
    const auto type = registry.resolve_type(trim(line.substr(0, colon)));
    const std::string value(trim(line.substr(colon + 1)));
    double alpha = 0;
    std::size_t used = 0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception&) {
      throw LineError("'" + value + "' is not a number", lineno);
    }
    if (used != value.size()) throw LineError("'" + value + "' is not a number", lineno);
    table.set(type, alpha);
  }
  return table;
}

AlphaTable AlphaTable::parse_file(const std::string& path, const ConfusionRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alpha file " + path);
  return parse(in, registry);
}

void AlphaTable::set(const ErrorType& type, double alpha) {
  check_alpha(alpha);
  per_type_[type] = alpha;
}

double AlphaTable::at(const ErrorType& type) const {
  auto it = per_type_.find(type);
  return it == per_type_.end() ? fallback_ : it->second;
}

std::optional<double> AlphaTable::explicit_value(const ErrorType& type) const {
  auto it = per_type_.find(type);
  if (it == per_type_.end()) return std::nullopt;
  return it->second;
}

void AlphaTable::write(std::ostream& out) const {
  for (const auto& [t, a] : per_type_) out << t.name() << ": " << a << '\n';
}

// ---------------------------------------------------------------------------

DataFlow build_dataflow(std::span<const std::string> tokens, std::size_t slot_index,
                        const ErrorType& error_type, const ConfusionRegistry& registry) {
  if (slot_index >= tokens.size())
    throw SlotOutOfRange("slot " + std::to_string(slot_index) + " out of range for " +
                         std::to_string(tokens.size()) + " tokens");
  const auto& words = registry.candidates(error_type);
  DataFlow flow;
  flow.base_tokens.assign(tokens.begin(), tokens.end());
  flow.slot_index = slot_index;
  flow.error_type = error_type;
  flow.variants.reserve(words.size());
  for (const auto& w : words) {
    Variant v{w, flow.base_tokens};
    v.tokens[slot_index] = w;
    flow.variants.push_back(std::move(v));
  }
  return flow;
}

std::vector<std::size_t> rank_order(std::span<const std::string> candidates,
                                    std::span<const OrderScores> scores, ScorerMode mode,
                                    double alpha) {
  std::vector<double> keys;
  keys.reserve(scores.size());
  for (const auto& s : scores) keys.push_back(select_score(s, mode, alpha));
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return candidates[a] < candidates[b];
  });
  return order;
}

RankedList rank_candidates(const DataFlow& flow, const MlmOracle& oracle, double alpha,
                           ScorerMode mode) {
  check_alpha(alpha);
  std::vector<std::vector<std::string>> sentences;
  std::vector<std::string> candidates;
  for (const auto& v : flow.variants) {
    sentences.push_back(v.tokens);
    candidates.push_back(v.candidate);
  }
  const auto scores = score_orders(sentences, oracle);
  RankedList ranked;
  for (auto i : rank_order(candidates, scores, mode, alpha))
    ranked.entries.push_back({candidates[i], make_breakdown(scores[i], alpha)});
  return ranked;
}

Correction correct(std::span<const std::string> tokens, std::size_t slot,
                   const ErrorType& error_type, const ConfusionRegistry& registry,
                   const MlmOracle& oracle, double alpha, ScorerMode mode) {
  const auto flow = build_dataflow(tokens, slot, error_type, registry);
  Correction c;
  c.position = slot;
  c.error_type = error_type;
  if (tokens[slot] != kMaskToken) c.original_word = tokens[slot];
  c.ranked = rank_candidates(flow, oracle, alpha, mode);
  c.predicted_word = c.ranked.entries.front().candidate;
  c.changed = c.original_word && fold_case(*c.original_word) != fold_case(c.predicted_word);
  return c;
}

std::vector<std::string> recommend_topk(std::span<const std::string> tokens, std::size_t slot,
                                        const ErrorType& error_type,
                                        const ConfusionRegistry& registry,
                                        const MlmOracle& oracle, double alpha, std::size_t k,
                                        ScorerMode mode) {
  if (k == 0) throw DataError("k must be >= 1");
  const auto c = correct(tokens, slot, error_type, registry, oracle, alpha, mode);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, c.ranked.entries.size()); ++i)
    out.push_back(c.ranked.entries[i].candidate);
  return out;
}

std::vector<Correction> correct_text(std::span<const std::string> tokens,
                                     const ConfusionRegistry& registry, const MlmOracle& oracle,
                                     const AlphaTable& alphas) {
  std::vector<Correction> out;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    for (const auto& type : registry.match_types(tokens[i]))
      out.push_back(correct(tokens, i, type, registry, oracle, alphas.at(type)));
  return out;
}

std::vector<std::string> apply_corrections(std::span<const std::string> tokens,
                                           std::span<const Correction> corrections) {
  std::vector<std::string> out(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::optional<std::string> replacement;
    bool agree = true;
    bool any = false;
    for (const auto& c : corrections) {
      if (c.position != i) continue;
      any = true;
      if (!c.changed || (replacement && *replacement != c.predicted_word)) {
        agree = false;
        break;
      }
      replacement = c.predicted_word;
    }
    if (any && agree && replacement) out[i] = *replacement;
  }
  return out;
}

}  // namespace pplgec
