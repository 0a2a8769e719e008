#include "pplgec/text.hpp"

#include <array>
#include <cctype>

namespace pplgec {

namespace {

constexpr std::string_view kMask = "[MASK]";

// Multi-byte punctuation seen in news text: curly quotes, guillemets,
// ellipsis and dashes.
constexpr std::array<std::string_view, 9> kWidePunct = {
    "“", "”", "‘", "’", "«",
    "»", "…", "–", "—"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Length in bytes of a punctuation mark at the front of `s`, or 0.
std::size_t leading_punct(std::string_view s) {
  if (s.empty()) return 0;
  const auto c = static_cast<unsigned char>(s.front());
  if (c < 0x80) return std::ispunct(c) ? 1 : 0;
  for (auto p : kWidePunct)
    if (s.starts_with(p)) return p.size();
  return 0;
}

std::size_t trailing_punct(std::string_view s) {
  if (s.empty()) return 0;
  const auto c = static_cast<unsigned char>(s.back());
  if (c < 0x80) return std::ispunct(c) ? 1 : 0;
  for (auto p : kWidePunct)
    if (s.ends_with(p)) return p.size();
  return 0;
}

}  // namespace

std::string fold_case(std::string_view word) {
  std::string out(word);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + ('a' - 'A'));
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // U+00C0..U+00DE map to U+00E0..U+00FE, except the multiplication sign.
      const auto next = static_cast<unsigned char>(out[i + 1]);
      if (next >= 0x80 && next <= 0x9E && next != 0x97)
        out[i + 1] = static_cast<char>(next + 0x20);
      ++i;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> tokenize_sentence(std::string_view line) {
  std::vector<std::string> out;
  for (const auto& raw : split_whitespace(line)) {
    std::string_view word = raw;
    if (word == kMask) {
      out.emplace_back(word);
      continue;
    }
    std::vector<std::string> tail;
    while (auto n = leading_punct(word)) {
      out.emplace_back(word.substr(0, n));
      word.remove_prefix(n);
    }
    while (auto n = trailing_punct(word)) {
      tail.emplace_back(word.substr(word.size() - n));
      word.remove_suffix(n);
    }
    if (!word.empty()) out.emplace_back(word);
    out.insert(out.end(), tail.rbegin(), tail.rend());
  }
  return out;
}

}  // namespace pplgec
