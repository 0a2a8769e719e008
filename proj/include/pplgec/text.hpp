#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pplgec {

/// Lowercases ASCII and the Latin-1 supplement letters (UTF-8 encoded).
/// Everything else passes through unchanged.
std::string fold_case(std::string_view word);

std::string_view trim(std::string_view s);

/// Splits on runs of ASCII whitespace; no empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// Splits on every occurrence of `sep`; keeps empty pieces.
std::vector<std::string_view> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

/// Whitespace split followed by peeling leading and trailing punctuation
/// into tokens of their own. "[MASK]" is kept whole.
std::vector<std::string> tokenize_sentence(std::string_view line);

}  // namespace pplgec
