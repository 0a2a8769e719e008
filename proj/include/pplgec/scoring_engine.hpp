#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pplgec/mlm_oracle.hpp"

namespace pplgec {

/// Which pseudo-perplexity drives a ranking.
enum class ScorerMode { First, Second, Fused };

std::string_view to_string(ScorerMode mode);
/// Accepts "first", "second", "fused". Throws DataError otherwise.
ScorerMode parse_scorer_mode(std::string_view name);

/// Alpha-free pair of per-token pseudo-perplexities. Lower is more fluent.
struct OrderScores {
  double first_order = 0;
  double second_order = 0;
  std::size_t token_count = 0;
};

struct ScoreBreakdown {
  double first_order = 0;
  double second_order = 0;
  double fused = 0;
  double alpha = 0;
  std::size_t token_count = 0;
};

/// -(1/n) * sum_t log P(w_t | sentence with t masked).
double first_order_score(std::span<const std::string> tokens, const MlmOracle& oracle);

/// -(1/n) * sum_t log SOR(t). Boundary tokens take the single adjacent
/// two-token window; interior tokens average (in probability space) the
/// windows {t-1, t} and {t, t+1}. A one-token sentence has no window and
/// scores as first_order_score.
double second_order_score(std::span<const std::string> tokens, const MlmOracle& oracle);

/// log SOR(t) for every position. Empty for a one-token sentence.
std::vector<double> second_order_terms(std::span<const std::string> tokens,
                                       const MlmOracle& oracle);

/// alpha * first + (1 - alpha) * second. Throws AlphaOutOfRange.
double fused_score(double first, double second, double alpha);

void check_alpha(double alpha);

/// Scores both orders for one sentence; all masks go out as one batch.
ScoreBreakdown score_variant(std::span<const std::string> tokens, const MlmOracle& oracle,
                             double alpha);

/// Scores several sentences with a single oracle batch: per sentence, n
/// single-mask queries plus n-1 adjacent two-mask windows.
std::vector<OrderScores> score_orders(std::span<const std::vector<std::string>> sentences,
                                      const MlmOracle& oracle);

/// The score a ranking sorts on under `mode`.
double select_score(const OrderScores& scores, ScorerMode mode, double alpha);

ScoreBreakdown make_breakdown(const OrderScores& scores, double alpha);

}  // namespace pplgec
