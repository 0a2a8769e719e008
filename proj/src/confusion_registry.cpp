#include "pplgec/confusion_registry.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "pplgec/errors.hpp"
#include "pplgec/text.hpp"

namespace pplgec {

namespace {

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  });
}

// `lines` maps set index to its source line, when known.
void validate_sets(const std::vector<ConfusionSet>& sets, const std::vector<std::size_t>& lines) {
  auto line_of = [&](std::size_t i) { return i < lines.size() ? lines[i] : i + 1; };
  if (sets.empty()) throw EmptySet("registry defines no confusion sets");

  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& set = sets[i];
    const auto& name = set.error_type.name();
    if (name.empty() || has_space(name))
      throw MalformedRegistry("invalid error type name '" + name + "'", line_of(i));
    if (!names.insert(canonical_type_name(name)).second)
      throw MalformedRegistry("error type '" + name + "' declared twice", line_of(i));
    if (set.words.size() < 2)
      throw EmptySet("confusion set '" + name + "' needs at least 2 words (line " +
                     std::to_string(line_of(i)) + ")");
    std::unordered_set<std::string> seen;
    for (const auto& w : set.words) {
      if (w.empty() || has_space(w))
        throw MalformedRegistry("invalid word '" + w + "' in set '" + name + "'", line_of(i));
      if (!seen.insert(fold_case(w)).second)
        throw DuplicateWordInSet("word '" + w + "' repeated in set '" + name + "'", line_of(i));
    }
  }
}

}  // namespace

std::string canonical_type_name(std::string_view name) {
  std::string out = fold_case(trim(name));
  for (auto& c : out)
    if (c == ' ' || c == '-') c = '_';
  return out;
}

ConfusionRegistry ConfusionRegistry::from_sets(std::vector<ConfusionSet> sets) {
  validate_sets(sets, {});
  ConfusionRegistry reg;
  reg.sets_ = std::move(sets);
  for (std::size_t i = 0; i < reg.sets_.size(); ++i) {
    reg.type_index_.emplace(canonical_type_name(reg.sets_[i].error_type.name()), i);
    for (const auto& w : reg.sets_[i].words) reg.word_index_[fold_case(w)].push_back(i);
  }
  return reg;
}

std::vector<ErrorType> ConfusionRegistry::types() const {
  std::vector<ErrorType> out;
  out.reserve(sets_.size());
  for (const auto& s : sets_) out.push_back(s.error_type);
  return out;
}

std::vector<ErrorType> ConfusionRegistry::match_types(std::string_view word) const {
  std::vector<ErrorType> out;
  if (auto it = word_index_.find(fold_case(word)); it != word_index_.end())
    for (auto i : it->second) out.push_back(sets_[i].error_type);
  return out;
}

const ConfusionSet& ConfusionRegistry::set_of(const ErrorType& type) const {
  auto it = type_index_.find(canonical_type_name(type.name()));
  if (it == type_index_.end()) throw UnknownErrorType("unknown error type '" + type.name() + "'");
  return sets_[it->second];
}

const std::vector<std::string>& ConfusionRegistry::candidates(const ErrorType& type) const {
  return set_of(type).words;
}

std::optional<ErrorType> ConfusionRegistry::find_type(std::string_view name) const {
  auto it = type_index_.find(canonical_type_name(name));
  if (it == type_index_.end()) return std::nullopt;
  return sets_[it->second].error_type;
}

ErrorType ConfusionRegistry::resolve_type(std::string_view name) const {
  if (auto t = find_type(name)) return *t;
  throw UnknownErrorType("unknown error type '" + std::string(name) + "'");
}

bool ConfusionRegistry::contains(const ErrorType& type, std::string_view word) const {
  auto it = word_index_.find(fold_case(word));
  if (it == word_index_.end()) return false;
  const auto& target = set_of(type).error_type;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](std::size_t i) { return sets_[i].error_type == target; });
}

void ConfusionRegistry::write(std::ostream& os) const {
  for (const auto& s : sets_) {
    os << s.error_type.name() << ": " << join(s.words, ", ") << '\n';
  }
}

std::string ConfusionRegistry::to_string() const {
  std::ostringstream os;
  write(os);
  return os.str();
}

ConfusionRegistry load_confusion_sets(std::istream& in) {
  std::vector<ConfusionSet> sets;
  std::vector<std::size_t> lines;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos)
      throw MalformedRegistry("expected '<error_type>: w1, w2, ...'", lineno);
    ConfusionSet set;
    set.error_type = ErrorType(std::string(trim(line.substr(0, colon))));
    if (set.error_type.name().empty()) throw MalformedRegistry("missing error type name", lineno);
    const auto body = trim(line.substr(colon + 1));
    if (!body.empty()) {
      // Words never contain whitespace, so blanks separate words as well as commas.
      for (auto piece : split(body, ',')) {
        auto words = split_whitespace(piece);
        if (words.empty()) throw MalformedRegistry("empty word in list", lineno);
        for (auto& w : words) set.words.push_back(std::move(w));
      }
    }
    sets.push_back(std::move(set));
    lines.push_back(lineno);
  }
  validate_sets(sets, lines);
  return ConfusionRegistry::from_sets(std::move(sets));
}

ConfusionRegistry load_confusion_sets_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open registry file " + path.string());
  return load_confusion_sets(in);
}

const ConfusionRegistry& tagalog_registry() {
  static const ConfusionRegistry reg = [] {
    std::istringstream in{std::string(tagalog_registry_text())};
    return load_confusion_sets(in);
  }();
  return reg;
}

}  // namespace pplgec
