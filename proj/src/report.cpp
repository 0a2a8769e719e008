#include "pplgec/report.hpp"

#include <iomanip>
#include <sstream>

namespace pplgec {

Json to_json(const TypeMetrics& m, bool with_classes) {
  Json j;
  j["samples"] = m.samples;
  j["correct"] = m.correct;
  j["accuracy"] = m.accuracy;
  j["p_macro"] = m.p_macro;
  j["p_micro"] = m.p_micro;
  j["r_macro"] = m.r_macro;
  j["r_micro"] = m.r_micro;
  j["f05_macro_averaged"] = m.f05_macro_averaged;
  j["f05_macro_of_averages"] = m.f05_macro_of_averages;
  j["f05_micro"] = m.f05_micro;
  j["alpha"] = m.alpha ? Json(*m.alpha) : Json(nullptr);
  if (with_classes) {
    Json classes = Json::object();
    for (const auto& c : m.per_class) {
      classes[c.label] = {{"tp", c.tp},           {"fp", c.fp},         {"fn", c.fn},
                          {"support", c.support}, {"p", c.precision}, {"r", c.recall},
                          {"f05", c.f05}};
    }
    j["classes"] = std::move(classes);
  }
  return j;
}

Json to_json(const MetricsReport& r) {
  Json j;
  j["mode"] = std::string(to_string(r.mode));
  j["protocol"] = r.protocol;
  Json types = Json::object();
  for (const auto& t : r.per_type) types[t.name] = to_json(t);
  j["types"] = std::move(types);
  j["average"] = to_json(r.average, false);
  return j;
}

Json to_json(const AblationReport& r) {
  return {{"first_only", to_json(r.first_only)},
          {"second_only", to_json(r.second_only)},
          {"fused", to_json(r.fused)}};
}

Json to_json(const AlphaTuningResult& r) {
  Json types = Json::object();
  for (const auto& t : r.per_type) {
    Json curve = Json::array();
    for (const auto& [a, f] : t.curve) curve.push_back({a, f});
    types[t.type.name()] = {{"alpha", t.best_alpha},
                            {"f05_macro_averaged", t.best_f05_macro},
                            {"curve", std::move(curve)}};
  }
  return {{"types", std::move(types)}};
}

Json to_json(std::span<const HitCurve> curves) {
  Json j = Json::object();
  for (const auto& c : curves) {
    Json points = Json::array();
    for (const auto& [k, rate] : c.points) points.push_back({k, rate});
    j[c.name] = std::move(points);
  }
  return j;
}

Json to_json(const CorpusStats& s) {
  Json types = Json::object();
  for (const auto& [t, n] : s.per_type) types[t.name()] = n;
  return {{"types", std::move(types)}, {"total", s.total}};
}

Json to_json(const Correction& c) {
  Json ranked = Json::array();
  for (const auto& e : c.ranked.entries)
    ranked.push_back({{"word", e.candidate},
                      {"first_order", e.score.first_order},
                      {"second_order", e.score.second_order},
                      {"fused", e.score.fused}});
  return {{"position", c.position},
          {"error_type", c.error_type.name()},
          {"original", c.original_word ? Json(*c.original_word) : Json(nullptr)},
          {"predicted", c.predicted_word},
          {"changed", c.changed},
          {"alpha", c.ranked.entries.empty() ? 0.0 : c.ranked.entries.front().score.alpha},
          {"ranked", std::move(ranked)}};
}

std::string format_table(const MetricsReport& r) {
  std::size_t width = 7;
  for (const auto& t : r.per_type) width = std::max(width, t.name.size());
  std::ostringstream os;
  const auto w = static_cast<int>(width);
  os << std::left << std::setw(w) << "Type";
  for (const char* h : {"P_macro", "P_micro", "R_macro", "R_micro", "F0.5_macro", "F0.5_micro",
                        "F0.5'_macro", "alpha"})
    os << "  " << std::right << std::setw(11) << h;
  os << '\n';
  auto row = [&](const TypeMetrics& m) {
    os << std::left << std::setw(w) << m.name << std::fixed << std::setprecision(4);
    for (double v : {m.p_macro, m.p_micro, m.r_macro, m.r_micro, m.f05_macro_averaged,
                     m.f05_micro, m.f05_macro_of_averages})
      os << "  " << std::right << std::setw(11) << v;
    os << "  " << std::right << std::setw(11);
    if (m.alpha)
      os << *m.alpha;
    else
      os << "-";
    os << '\n';
  };
  for (const auto& t : r.per_type) row(t);
  row(r.average);
  return os.str();
}

}  // namespace pplgec
