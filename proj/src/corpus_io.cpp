#include "pplgec/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "pplgec/errors.hpp"
#include "pplgec/random.hpp"
#include "pplgec/text.hpp"

namespace pplgec {

std::size_t Sample::slot() const {
  auto it = std::find(tokens.begin(), tokens.end(), kMaskToken);
  return static_cast<std::size_t>(it - tokens.begin());
}

void validate_sample(const Sample& sample, const ConfusionRegistry& registry, std::size_t row) {
  if (sample.tokens.empty()) throw MalformedRow("empty sentence", row);
  const auto masks = std::count(sample.tokens.begin(), sample.tokens.end(), kMaskToken);
  if (masks != 1)
    throw MissingOrMultipleMaskSlot(
        "expected exactly one [MASK] token, found " + std::to_string(masks), row);
  if (sample.answer.empty()) throw MalformedRow("empty answer", row);
  if (!registry.contains(sample.error_type, sample.answer))
    throw AnswerNotInConfusionSet("answer '" + sample.answer + "' is not in the '" +
                                      sample.error_type.name() + "' confusion set",
                                  row);
}

Corpus parse_corpus(std::istream& in, const ConfusionRegistry& registry) {
  Corpus corpus;
  std::string line;
  std::size_t row = 0;
  bool in_header = true;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_header && !line.empty() && line.front() == '#' &&
        line.find('\t') == std::string::npos) {
      std::string_view text = line;
      text.remove_prefix(1);
      if (!text.empty() && text.front() == ' ') text.remove_prefix(1);
      if (!corpus.provenance.empty()) corpus.provenance += '\n';
      corpus.provenance += text;
      continue;
    }
    in_header = false;
    if (trim(line).empty()) continue;

    const auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw MalformedRow("expected 3 tab-separated fields, found " + std::to_string(fields.size()),
                         row);
    Sample s;
    s.tokens = split_whitespace(fields[0]);
    s.answer = std::string(trim(fields[1]));
    const auto type = registry.find_type(fields[2]);
    if (!type)
      throw UnknownErrorType("line " + std::to_string(row) + ": unknown error type '" +
                             std::string(fields[2]) + "'");
    s.error_type = *type;
    validate_sample(s, registry, row);
    corpus.samples.push_back(std::move(s));
  }
  return corpus;
}

Corpus parse_corpus_file(const std::string& path, const ConfusionRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  return parse_corpus(in, registry);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  if (!corpus.provenance.empty()) {
    for (auto l : split(corpus.provenance, '\n')) {
      out << '#';
      if (!l.empty()) out << ' ' << l;
      out << '\n';
    }
  }
  for (const auto& s : corpus.samples)
    out << join(s.tokens) << '\t' << s.answer << '\t' << s.error_type.name() << '\n';
  if (!out) throw Error("failed writing corpus");
}

Corpus build_corpus(std::istream& raw, const ConfusionRegistry& registry, const Quota& quota,
                    std::uint64_t seed) {
  std::vector<std::vector<std::string>> lines;
  for (std::string line; std::getline(raw, line);) lines.push_back(tokenize_sentence(line));

  Corpus corpus;
  std::mt19937_64 rng(seed);
  for (const auto& set : registry.sets()) {
    std::size_t want = 0;
    if (auto it = quota.find(set.error_type); it != quota.end()) want = it->second;
    if (want == 0) continue;

    struct Occurrence {
      std::size_t line;
      std::size_t position;
    };
    std::vector<Occurrence> pairs;
    for (std::size_t li = 0; li < lines.size(); ++li)
      for (std::size_t p = 0; p < lines[li].size(); ++p)
        if (registry.contains(set.error_type, lines[li][p])) pairs.push_back({li, p});
    shuffle(pairs, rng);

    std::vector<Occurrence> chosen;
    std::unordered_set<std::size_t> used;
    for (const auto& occ : pairs) {
      if (chosen.size() == want) break;
      if (used.insert(occ.line).second) chosen.push_back(occ);
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const Occurrence& a, const Occurrence& b) { return a.line < b.line; });
    for (const auto& occ : chosen) {
      Sample s;
      s.tokens = lines[occ.line];
      s.answer = s.tokens[occ.position];
      s.tokens[occ.position] = std::string(kMaskToken);
      s.error_type = set.error_type;
      corpus.samples.push_back(std::move(s));
    }
  }
  return corpus;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (const auto& s : corpus.samples) {
    auto it = std::find_if(stats.per_type.begin(), stats.per_type.end(),
                           [&](const auto& e) { return e.first == s.error_type; });
    if (it == stats.per_type.end())
      stats.per_type.emplace_back(s.error_type, 1);
    else
      ++it->second;
    ++stats.total;
  }
  return stats;
}

CorpusStats corpus_stats(const Corpus& corpus, const ConfusionRegistry& registry) {
  CorpusStats stats;
  for (const auto& t : registry.types()) stats.per_type.emplace_back(t, 0);
  for (const auto& s : corpus.samples) {
    auto it = std::find_if(stats.per_type.begin(), stats.per_type.end(),
                           [&](const auto& e) { return e.first == s.error_type; });
    if (it == stats.per_type.end())
      stats.per_type.emplace_back(s.error_type, 1);
    else
      ++it->second;
    ++stats.total;
  }
  return stats;
}

std::string format_stats_table(const CorpusStats& stats) {
  std::size_t width = std::string_view("Error Type").size();
  for (const auto& [t, n] : stats.per_type) width = std::max(width, t.name().size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "Error Type" << "  "
     << "Num. of Samples\n";
  for (const auto& [t, n] : stats.per_type)
    os << std::left << std::setw(static_cast<int>(width)) << t.name() << "  " << n << '\n';
  os << std::left << std::setw(static_cast<int>(width)) << "total" << "  " << stats.total << '\n';
  return os.str();
}

}  // namespace pplgec
