#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pplgec/corpus_io.hpp"
#include "pplgec/corrector.hpp"
#include "pplgec/eval_harness.hpp"

namespace pplgec {

using Json = nlohmann::ordered_json;

/// Field names: p_macro, p_micro, r_macro, r_micro, f05_macro_averaged,
/// f05_macro_of_averages, f05_micro, alpha (plus accuracy and counts).
Json to_json(const TypeMetrics& metrics, bool with_classes = true);
Json to_json(const MetricsReport& report);
Json to_json(const AblationReport& report);
Json to_json(const AlphaTuningResult& result);
Json to_json(std::span<const HitCurve> curves);
Json to_json(const CorpusStats& stats);
Json to_json(const Correction& correction);

/// Aligned text table with the columns Type, P_macro, P_micro, R_macro,
/// R_micro, F0.5_macro, F0.5_micro, F0.5'_macro, alpha.
std::string format_table(const MetricsReport& report);

}  // namespace pplgec
