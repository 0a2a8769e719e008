#include "pplgec/scoring_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pplgec/errors.hpp"

namespace pplgec {

namespace {

// Oracle queries for one sentence: n singles, then n-1 windows (j, j+1).
void append_queries(const std::vector<std::string>& tokens, std::vector<MaskQuery>& out) {
  const std::size_t n = tokens.size();
  for (std::size_t t = 0; t < n; ++t) out.push_back({tokens, {t}, {tokens[t]}});
  for (std::size_t j = 0; j + 1 < n; ++j)
    out.push_back({tokens, {j, j + 1}, {tokens[j], tokens[j + 1]}});
}

// log(0.5 * (e^a + e^b)), evaluated literally unless both terms underflow.
double log_mean_prob(double a, double b) {
  const double p = 0.5 * (std::exp(a) + std::exp(b));
  if (p > 0) return std::log(p);
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b))) - std::log(2.0);
}

struct SentenceLogprobs {
  std::vector<double> single;              // log P(w_t | mask{t})
  std::vector<std::array<double, 2>> win;  // window j: {log P(w_j), log P(w_{j+1})}
};

std::vector<double> sor_terms(const SentenceLogprobs& lp) {
  const std::size_t n = lp.single.size();
  std::vector<double> out;
  if (n < 2) return out;
  out.reserve(n);
  out.push_back(lp.win.front()[0]);
  for (std::size_t t = 1; t + 1 < n; ++t) out.push_back(log_mean_prob(lp.win[t - 1][1], lp.win[t][0]));
  out.push_back(lp.win.back()[1]);
  return out;
}

OrderScores reduce(const SentenceLogprobs& lp) {
  const std::size_t n = lp.single.size();
  OrderScores s;
  s.token_count = n;
  double sum = 0;
  for (double v : lp.single) sum += v;
  s.first_order = -sum / static_cast<double>(n);
  if (n == 1) {
    s.second_order = s.first_order;
  } else {
    double sor = 0;
    for (double v : sor_terms(lp)) sor += v;
    s.second_order = -sor / static_cast<double>(n);
  }
  return s;
}

void check_sentence(std::span<const std::string> tokens, const MlmOracle& oracle) {
  if (tokens.empty()) throw InvalidQuery("cannot score an empty sentence");
  if (auto limit = oracle.max_tokens(); limit && tokens.size() > *limit)
    throw SequenceTooLong("sentence has " + std::to_string(tokens.size()) +
                          " tokens, oracle accepts at most " + std::to_string(*limit));
}

std::vector<SentenceLogprobs> collect(std::span<const std::vector<std::string>> sentences,
                                      const MlmOracle& oracle) {
  std::vector<MaskQuery> queries;
  for (const auto& s : sentences) {
    check_sentence(s, oracle);
    append_queries(s, queries);
  }
  const auto responses = oracle.query(queries);
  if (responses.size() != queries.size())
    throw BackendUnavailable("oracle returned a short batch");

  std::vector<SentenceLogprobs> out;
  out.reserve(sentences.size());
  std::size_t at = 0;
  for (const auto& s : sentences) {
    SentenceLogprobs lp;
    const std::size_t n = s.size();
    for (std::size_t t = 0; t < n; ++t) lp.single.push_back(responses.at(at++).logprobs.at(0));
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const auto& r = responses.at(at++).logprobs;
      lp.win.push_back({r.at(0), r.at(1)});
    }
    out.push_back(std::move(lp));
  }
  return out;
}

}  // namespace

std::string_view to_string(ScorerMode mode) {
  switch (mode) {
    case ScorerMode::First: return "first";
    case ScorerMode::Second: return "second";
    case ScorerMode::Fused: return "fused";
  }
  return "fused";
}

ScorerMode parse_scorer_mode(std::string_view name) {
  if (name == "first") return ScorerMode::First;
  if (name == "second") return ScorerMode::Second;
  if (name == "fused") return ScorerMode::Fused;
  throw DataError("unknown scorer mode '" + std::string(name) + "' (first|second|fused)");
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw AlphaOutOfRange("alpha must lie in [0, 1], got " + std::to_string(alpha));
}

double fused_score(double first, double second, double alpha) {
  check_alpha(alpha);
  return alpha * first + (1.0 - alpha) * second;
}

std::vector<OrderScores> score_orders(std::span<const std::vector<std::string>> sentences,
                                      const MlmOracle& oracle) {
  const auto lps = collect(sentences, oracle);
  std::vector<OrderScores> out;
  out.reserve(lps.size());
  for (const auto& lp : lps) out.push_back(reduce(lp));
  return out;
}

double first_order_score(std::span<const std::string> tokens, const MlmOracle& oracle) {
  std::vector<std::vector<std::string>> one{{tokens.begin(), tokens.end()}};
  check_sentence(tokens, oracle);
  std::vector<MaskQuery> queries;
  for (std::size_t t = 0; t < tokens.size(); ++t) queries.push_back({one[0], {t}, {tokens[t]}});
  const auto res = oracle.query(queries);
  double sum = 0;
  for (const auto& r : res) sum += r.logprobs.at(0);
  return -sum / static_cast<double>(tokens.size());
}

std::vector<double> second_order_terms(std::span<const std::string> tokens,
                                       const MlmOracle& oracle) {
  check_sentence(tokens, oracle);
  std::vector<std::string> sentence(tokens.begin(), tokens.end());
  if (sentence.size() < 2) return {};
  std::vector<MaskQuery> queries;
  for (std::size_t j = 0; j + 1 < sentence.size(); ++j)
    queries.push_back({sentence, {j, j + 1}, {sentence[j], sentence[j + 1]}});
  const auto res = oracle.query(queries);
  SentenceLogprobs lp;
  lp.single.resize(sentence.size());
  for (const auto& r : res) lp.win.push_back({r.logprobs.at(0), r.logprobs.at(1)});
  return sor_terms(lp);
}

double second_order_score(std::span<const std::string> tokens, const MlmOracle& oracle) {
  if (tokens.size() == 1) return first_order_score(tokens, oracle);
  double sum = 0;
  for (double v : second_order_terms(tokens, oracle)) sum += v;
  return -sum / static_cast<double>(tokens.size());
}

ScoreBreakdown make_breakdown(const OrderScores& s, double alpha) {
  ScoreBreakdown b;
  b.first_order = s.first_order;
  b.second_order = s.second_order;
  b.alpha = alpha;
  b.fused = fused_score(s.first_order, s.second_order, alpha);
  b.token_count = s.token_count;
  return b;
}

ScoreBreakdown score_variant(std::span<const std::string> tokens, const MlmOracle& oracle,
                             double alpha) {
  check_alpha(alpha);
  std::vector<std::vector<std::string>> one{{tokens.begin(), tokens.end()}};
  return make_breakdown(score_orders(one, oracle).front(), alpha);
}

double select_score(const OrderScores& s, ScorerMode mode, double alpha) {
  switch (mode) {
    case ScorerMode::First: return s.first_order;
    case ScorerMode::Second: return s.second_order;
    case ScorerMode::Fused: return fused_score(s.first_order, s.second_order, alpha);
  }
  return fused_score(s.first_order, s.second_order, alpha);
}

}  // namespace pplgec
