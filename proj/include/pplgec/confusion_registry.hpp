#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pplgec {

/// Name of a grammatical error category, e.g. "negative_adverb".
class ErrorType {
 public:
  ErrorType() = default;
  explicit ErrorType(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const ErrorType&, const ErrorType&) = default;
  friend auto operator<=>(const ErrorType&, const ErrorType&) = default;

 private:
  std::string name_;
};

/// Canonical spelling used for type lookups: case folded, spaces and
/// hyphens turned into underscores. "Indefinite pronoun" -> "indefinite_pronoun".
std::string canonical_type_name(std::string_view name);

struct ConfusionSet {
  ErrorType error_type;
  std::vector<std::string> words;  // stored forms, declaration order
};

/// Error types with their closed candidate sets. Immutable once built.
class ConfusionRegistry {
 public:
  /// Validates every set and builds the word index.
  /// Throws EmptySet, DuplicateWordInSet or MalformedRegistry.
  static ConfusionRegistry from_sets(std::vector<ConfusionSet> sets);

  const std::vector<ConfusionSet>& sets() const noexcept { return sets_; }
  std::vector<ErrorType> types() const;
  std::size_t size() const noexcept { return sets_.size(); }

  /// Types whose set contains `word`, case-insensitively, in declaration order.
  std::vector<ErrorType> match_types(std::string_view word) const;

  /// Ordered candidate list of a type. Throws UnknownErrorType.
  const std::vector<std::string>& candidates(const ErrorType& type) const;

  /// Looks a type up by any spelling accepted by canonical_type_name.
  std::optional<ErrorType> find_type(std::string_view name) const;
  /// Same as find_type but throws UnknownErrorType.
  ErrorType resolve_type(std::string_view name) const;

  bool contains(const ErrorType& type, std::string_view word) const;

  /// Writes the registry in its line format; load_confusion_sets reads it back.
  void write(std::ostream& os) const;
  std::string to_string() const;

 private:
  const ConfusionSet& set_of(const ErrorType& type) const;

  std::vector<ConfusionSet> sets_;
  // folded word -> indices into sets_
  std::unordered_map<std::string, std::vector<std::size_t>> word_index_;
  std::unordered_map<std::string, std::size_t> type_index_;
};

/// Parses `<type>: w1, w2, ...` lines; `#` starts a comment line.
ConfusionRegistry load_confusion_sets(std::istream& in);
ConfusionRegistry load_confusion_sets_file(const std::filesystem::path& path);

/// Registry text for the 8 Tagalog error types, bundled at build time.
std::string_view tagalog_registry_text();
const ConfusionRegistry& tagalog_registry();

}  // namespace pplgec
