#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pplgec/confusion_registry.hpp"
#include "pplgec/corpus_io.hpp"
#include "pplgec/corrector.hpp"
#include "pplgec/mlm_oracle.hpp"
#include "pplgec/scoring_engine.hpp"

namespace pplgec {

/// (1 + b^2) p r / (b^2 p + r), 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta = 0.5);

/// One class is one confusion word.
struct ClassMetrics {
  std::string label;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;
  double precision = 0;  // 0 when the class is never predicted
  double recall = 0;
  double f05 = 0;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct TypeMetrics {
  std::string name;
  std::size_t samples = 0;
  std::size_t correct = 0;
  double accuracy = 0;
  double p_micro = 0;
  double r_micro = 0;
  double f05_micro = 0;
  /// Unweighted means over classes with support > 0.
  double p_macro = 0;
  double r_macro = 0;
  /// Mean of per-class F0.5.
  double f05_macro_averaged = 0;
  /// F0.5 of (p_macro, r_macro).
  double f05_macro_of_averages = 0;
  std::optional<double> alpha;
  std::vector<ClassMetrics> per_class;

  friend bool operator==(const TypeMetrics&, const TypeMetrics&) = default;
};

/// Single-label multi-class metrics. Every gold and predicted label must be
/// one of `classes`.
TypeMetrics compute_metrics(std::string name, std::span<const std::string> classes,
                            std::span<const std::string> gold,
                            std::span<const std::string> predicted);

struct MetricsReport {
  ScorerMode mode = ScorerMode::Fused;
  /// How alphas were chosen: "fixed", "resubstitution" or "dev-test-split".
  std::string protocol = "fixed";
  std::vector<TypeMetrics> per_type;  // registry order, types without samples omitted
  TypeMetrics average;                // unweighted mean over per_type
};

/// Every candidate of every sample scored once; rankings for any mode and
/// alpha are derived from this without new oracle traffic.
struct ScoredSample {
  ErrorType type;
  std::string gold;                     // case folded
  std::vector<std::string> candidates;  // case folded, registry order
  std::vector<OrderScores> scores;
};

struct ScoredCorpus {
  std::vector<ScoredSample> samples;
};

/// Throws EmptyCorpus. `jobs` = 0 uses all hardware threads.
ScoredCorpus score_corpus(const Corpus& corpus, const ConfusionRegistry& registry,
                          const MlmOracle& oracle, std::size_t jobs = 0);

/// Top candidate of a scored sample.
const std::string& predict(const ScoredSample& sample, ScorerMode mode, double alpha);

MetricsReport evaluate_scored(const ScoredCorpus& scored, const ConfusionRegistry& registry,
                              const AlphaTable& alphas, ScorerMode mode);

MetricsReport evaluate(const Corpus& corpus, const ConfusionRegistry& registry,
                       const MlmOracle& oracle, const AlphaTable& alphas, ScorerMode mode,
                       std::size_t jobs = 0);

/// Fraction of samples whose gold answer is within the top k candidates.
double hit_at_k_scored(const ScoredCorpus& scored, const AlphaTable& alphas, ScorerMode mode,
                       std::size_t k);

double hit_at_k(const Corpus& corpus, const ConfusionRegistry& registry, const MlmOracle& oracle,
                const AlphaTable& alphas, std::size_t k, ScorerMode mode = ScorerMode::Fused,
                std::size_t jobs = 0);

struct HitCurve {
  std::string name;  // error type, or "all"
  std::vector<std::pair<std::size_t, double>> points;  // (k, rate) for k = 1..k_max
};

/// One curve per error type with samples, then the pooled curve.
std::vector<HitCurve> hit_curves(const ScoredCorpus& scored, const ConfusionRegistry& registry,
                                 const AlphaTable& alphas, ScorerMode mode, std::size_t k_max);

struct TypeTuning {
  ErrorType type;
  double best_alpha = 0;
  double best_f05_macro = 0;
  std::vector<std::pair<double, double>> curve;  // (alpha, F0.5 macro averaged)
};

struct AlphaTuningResult {
  std::vector<TypeTuning> per_type;
  AlphaTable table() const;
};

/// 0.00, 0.01, ..., 1.00
std::vector<double> default_alpha_grid();

/// Per type, the grid alpha maximising averaged F0.5 (ties go to the smaller alpha).
AlphaTuningResult tune_alpha_scored(const ScoredCorpus& scored, const ConfusionRegistry& registry,
                                    std::span<const double> grid);

AlphaTuningResult tune_alpha(const Corpus& corpus, const ConfusionRegistry& registry,
                             const MlmOracle& oracle, std::span<const double> grid,
                             std::size_t jobs = 0);

struct AblationReport {
  MetricsReport first_only;
  MetricsReport second_only;
  MetricsReport fused;
};

AblationReport ablation_report_scored(const ScoredCorpus& scored,
                                      const ConfusionRegistry& registry,
                                      const AlphaTable& alphas);

AblationReport ablation_report(const Corpus& corpus, const ConfusionRegistry& registry,
                               const MlmOracle& oracle, const AlphaTable& alphas,
                               std::size_t jobs = 0);

/// Per-type seeded split into (dev, test); dev gets round(fraction * n) of each type.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double dev_fraction,
                                       std::uint64_t seed);

}  // namespace pplgec
