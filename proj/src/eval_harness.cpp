#include "pplgec/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "pplgec/errors.hpp"
#include "pplgec/parallel.hpp"
#include "pplgec/random.hpp"
#include "pplgec/text.hpp"

namespace pplgec {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double alpha_for(ScorerMode mode, const AlphaTable& alphas, const ErrorType& type) {
  switch (mode) {
    case ScorerMode::First: return 1.0;
    case ScorerMode::Second: return 0.0;
    case ScorerMode::Fused: return alphas.at(type);
  }
  return alphas.at(type);
}

TypeMetrics metrics_for(const std::vector<const ScoredSample*>& samples, const ErrorType& type,
                        const ConfusionRegistry& registry, double alpha, ScorerMode mode) {
  std::vector<std::string> classes;
  for (const auto& w : registry.candidates(type)) classes.push_back(fold_case(w));
  std::vector<std::string> gold, predicted;
  gold.reserve(samples.size());
  predicted.reserve(samples.size());
  for (const auto* s : samples) {
    gold.push_back(s->gold);
    predicted.push_back(predict(*s, mode, alpha));
  }
  auto m = compute_metrics(type.name(), classes, gold, predicted);
  m.alpha = alpha;
  return m;
}

std::map<ErrorType, std::vector<const ScoredSample*>> by_type(const ScoredCorpus& scored) {
  std::map<ErrorType, std::vector<const ScoredSample*>> groups;
  for (const auto& s : scored.samples) groups[s.type].push_back(&s);
  return groups;
}

TypeMetrics average_of(const std::vector<TypeMetrics>& rows) {
  TypeMetrics avg;
  avg.name = "average";
  if (rows.empty()) return avg;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    avg.samples += r.samples;
    avg.correct += r.correct;
    avg.accuracy += r.accuracy;
    avg.p_micro += r.p_micro;
    avg.r_micro += r.r_micro;
    avg.f05_micro += r.f05_micro;
    avg.p_macro += r.p_macro;
    avg.r_macro += r.r_macro;
    avg.f05_macro_averaged += r.f05_macro_averaged;
    avg.f05_macro_of_averages += r.f05_macro_of_averages;
  }
  avg.accuracy /= n;
  avg.p_micro /= n;
  avg.r_micro /= n;
  avg.f05_micro /= n;
  avg.p_macro /= n;
  avg.r_macro /= n;
  avg.f05_macro_averaged /= n;
  avg.f05_macro_of_averages /= n;
  return avg;
}

}  // namespace

double f_beta(double precision, double recall, double beta) {
  // F_beta(p, p) == p; returning it directly keeps the micro identity exact.
  if (precision == recall) return precision;
  const double b2 = beta * beta;
  const double den = b2 * precision + recall;
  if (den == 0) return 0;
  return (1 + b2) * precision * recall / den;
}

TypeMetrics compute_metrics(std::string name, std::span<const std::string> classes,
                            std::span<const std::string> gold,
                            std::span<const std::string> predicted) {
  if (gold.size() != predicted.size())
    throw DataError("gold and predicted label counts differ");
  TypeMetrics m;
  m.name = std::move(name);
  m.samples = gold.size();
  m.per_class.reserve(classes.size());
  for (const auto& c : classes) m.per_class.push_back({c});

  auto index_of = [&](const std::string& label) {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == label) return i;
    throw DataError("label '" + label + "' is not a class of " + m.name);
  };
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = index_of(gold[i]);
    const auto p = index_of(predicted[i]);
    ++m.per_class[g].support;
    if (g == p) {
      ++m.per_class[g].tp;
      ++m.correct;
    } else {
      ++m.per_class[p].fp;
      ++m.per_class[g].fn;
    }
  }

  std::size_t tp = 0, fp = 0, fn = 0, active = 0;
  for (auto& c : m.per_class) {
    c.precision = ratio(c.tp, c.tp + c.fp);
    c.recall = ratio(c.tp, c.tp + c.fn);
    c.f05 = f_beta(c.precision, c.recall);
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    if (c.support == 0) continue;
    ++active;
    m.p_macro += c.precision;
    m.r_macro += c.recall;
    m.f05_macro_averaged += c.f05;
  }
  if (active) {
    m.p_macro /= static_cast<double>(active);
    m.r_macro /= static_cast<double>(active);
    m.f05_macro_averaged /= static_cast<double>(active);
  }
  m.f05_macro_of_averages = f_beta(m.p_macro, m.r_macro);
  m.p_micro = ratio(tp, tp + fp);
  m.r_micro = ratio(tp, tp + fn);
  m.f05_micro = f_beta(m.p_micro, m.r_micro);
  m.accuracy = ratio(m.correct, m.samples);
  return m;
}

ScoredCorpus score_corpus(const Corpus& corpus, const ConfusionRegistry& registry,
                          const MlmOracle& oracle, std::size_t jobs) {
  if (corpus.samples.empty()) throw EmptyCorpus("corpus has no samples");
  ScoredCorpus scored;
  scored.samples.resize(corpus.samples.size());
  parallel_for(corpus.samples.size(), jobs, [&](std::size_t i) {
    const auto& sample = corpus.samples[i];
    const auto flow = build_dataflow(sample.tokens, sample.slot(), sample.error_type, registry);
    std::vector<std::vector<std::string>> sentences;
    auto& out = scored.samples[i];
    out.type = sample.error_type;
    out.gold = fold_case(sample.answer);
    for (const auto& v : flow.variants) {
      sentences.push_back(v.tokens);
      out.candidates.push_back(fold_case(v.candidate));
    }
    out.scores = score_orders(sentences, oracle);
  });
  return scored;
}

const std::string& predict(const ScoredSample& sample, ScorerMode mode, double alpha) {
  return sample.candidates[rank_order(sample.candidates, sample.scores, mode, alpha).front()];
}

MetricsReport evaluate_scored(const ScoredCorpus& scored, const ConfusionRegistry& registry,
                              const AlphaTable& alphas, ScorerMode mode) {
  if (scored.samples.empty()) throw EmptyCorpus("corpus has no samples");
  MetricsReport report;
  report.mode = mode;
  const auto groups = by_type(scored);
  for (const auto& type : registry.types()) {
    auto it = groups.find(type);
    if (it == groups.end()) continue;
    report.per_type.push_back(
        metrics_for(it->second, type, registry, alpha_for(mode, alphas, type), mode));
  }
  report.average = average_of(report.per_type);
  return report;
}

MetricsReport evaluate(const Corpus& corpus, const ConfusionRegistry& registry,
                       const MlmOracle& oracle, const AlphaTable& alphas, ScorerMode mode,
                       std::size_t jobs) {
  return evaluate_scored(score_corpus(corpus, registry, oracle, jobs), registry, alphas, mode);
}

namespace {

bool hit(const ScoredSample& s, double alpha, ScorerMode mode, std::size_t k) {
  const auto order = rank_order(s.candidates, s.scores, mode, alpha);
  const std::size_t top = std::min(k, order.size());
  for (std::size_t i = 0; i < top; ++i)
    if (s.candidates[order[i]] == s.gold) return true;
  return false;
}

// 1-based rank of the gold answer.
std::size_t gold_rank(const ScoredSample& s, double alpha, ScorerMode mode) {
  const auto order = rank_order(s.candidates, s.scores, mode, alpha);
  for (std::size_t i = 0; i < order.size(); ++i)
    if (s.candidates[order[i]] == s.gold) return i + 1;
  return order.size() + 1;
}

}  // namespace

double hit_at_k_scored(const ScoredCorpus& scored, const AlphaTable& alphas, ScorerMode mode,
                       std::size_t k) {
  if (k == 0) throw DataError("k must be >= 1");
  if (scored.samples.empty()) throw EmptyCorpus("corpus has no samples");
  std::size_t hits = 0;
  for (const auto& s : scored.samples)
    if (hit(s, alpha_for(mode, alphas, s.type), mode, k)) ++hits;
  return ratio(hits, scored.samples.size());
}

double hit_at_k(const Corpus& corpus, const ConfusionRegistry& registry, const MlmOracle& oracle,
                const AlphaTable& alphas, std::size_t k, ScorerMode mode, std::size_t jobs) {
  if (k == 0) throw DataError("k must be >= 1");
  return hit_at_k_scored(score_corpus(corpus, registry, oracle, jobs), alphas, mode, k);
}

std::vector<HitCurve> hit_curves(const ScoredCorpus& scored, const ConfusionRegistry& registry,
                                 const AlphaTable& alphas, ScorerMode mode, std::size_t k_max) {
  if (k_max == 0) throw DataError("k must be >= 1");
  if (scored.samples.empty()) throw EmptyCorpus("corpus has no samples");
  auto curve_of = [&](const std::string& name, const std::vector<const ScoredSample*>& samples) {
    std::vector<std::size_t> at_rank(k_max + 2, 0);
    for (const auto* s : samples)
      ++at_rank[std::min(gold_rank(*s, alpha_for(mode, alphas, s->type), mode), k_max + 1)];
    HitCurve c{name, {}};
    std::size_t cumulative = 0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      cumulative += at_rank[k];
      c.points.emplace_back(k, ratio(cumulative, samples.size()));
    }
    return c;
  };

  std::vector<HitCurve> out;
  const auto groups = by_type(scored);
  for (const auto& type : registry.types())
    if (auto it = groups.find(type); it != groups.end())
      out.push_back(curve_of(type.name(), it->second));
  std::vector<const ScoredSample*> all;
  for (const auto& s : scored.samples) all.push_back(&s);
  out.push_back(curve_of("all", all));
  return out;
}

AlphaTable AlphaTuningResult::table() const {
  AlphaTable t;
  for (const auto& r : per_type) t.set(r.type, r.best_alpha);
  return t;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  return grid;
}

AlphaTuningResult tune_alpha_scored(const ScoredCorpus& scored, const ConfusionRegistry& registry,
                                    std::span<const double> grid) {
  if (grid.empty()) throw DataError("alpha grid is empty");
  for (double a : grid) check_alpha(a);
  if (scored.samples.empty()) throw EmptyCorpus("corpus has no samples");

  AlphaTuningResult result;
  const auto groups = by_type(scored);
  for (const auto& type : registry.types()) {
    auto it = groups.find(type);
    if (it == groups.end()) continue;
    TypeTuning t;
    t.type = type;
    bool first = true;
    for (double alpha : grid) {
      const double f =
          metrics_for(it->second, type, registry, alpha, ScorerMode::Fused).f05_macro_averaged;
      t.curve.emplace_back(alpha, f);
      if (first || f > t.best_f05_macro || (f == t.best_f05_macro && alpha < t.best_alpha)) {
        t.best_alpha = alpha;
        t.best_f05_macro = f;
        first = false;
      }
    }
    result.per_type.push_back(std::move(t));
  }
  return result;
}

AlphaTuningResult tune_alpha(const Corpus& corpus, const ConfusionRegistry& registry,
                             const MlmOracle& oracle, std::span<const double> grid,
                             std::size_t jobs) {
  if (grid.empty()) throw DataError("alpha grid is empty");
  return tune_alpha_scored(score_corpus(corpus, registry, oracle, jobs), registry, grid);
}

AblationReport ablation_report_scored(const ScoredCorpus& scored,
                                      const ConfusionRegistry& registry,
                                      const AlphaTable& alphas) {
  return {evaluate_scored(scored, registry, alphas, ScorerMode::First),
          evaluate_scored(scored, registry, alphas, ScorerMode::Second),
          evaluate_scored(scored, registry, alphas, ScorerMode::Fused)};
}

AblationReport ablation_report(const Corpus& corpus, const ConfusionRegistry& registry,
                               const MlmOracle& oracle, const AlphaTable& alphas,
                               std::size_t jobs) {
  return ablation_report_scored(score_corpus(corpus, registry, oracle, jobs), registry, alphas);
}

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double dev_fraction,
                                       std::uint64_t seed) {
  if (!(dev_fraction >= 0.0 && dev_fraction <= 1.0))
    throw DataError("dev fraction must lie in [0, 1]");
  std::map<ErrorType, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i)
    groups[corpus.samples[i].error_type].push_back(i);

  std::vector<bool> to_dev(corpus.samples.size(), false);
  std::mt19937_64 rng(seed);
  for (auto& [type, idx] : groups) {
    shuffle(idx, rng);
    const auto take = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < take; ++i) to_dev[idx[i]] = true;
  }
  Corpus dev, test;
  dev.provenance = corpus.provenance;
  test.provenance = corpus.provenance;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i)
    (to_dev[i] ? dev : test).samples.push_back(corpus.samples[i]);
  return {std::move(dev), std::move(test)};
}

}  // namespace pplgec
