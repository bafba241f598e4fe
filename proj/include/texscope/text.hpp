#pragma once

// Byte-level text helpers shared by the extractors.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace texscope::text {

constexpr bool is_letter(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

constexpr bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

constexpr char to_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool iequals(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (to_lower(a[i]) != to_lower(b[i])) return false;
  }
  return true;
}

inline bool starts_with_icase(std::string_view s, std::string_view prefix) noexcept {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

// Splits on `sep`, trims every piece and drops the empty ones.
inline std::vector<std::string> split_trimmed(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    std::string_view piece = trim(s.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end + 1;
  }
  return out;
}

// Calls fn(word) for every maximal run of ASCII letters, case-folded.
template <class Fn>
void for_each_word(std::string_view s, Fn&& fn) {
  std::size_t i = 0;
  std::string word;
  while (i < s.size()) {
    if (!is_letter(s[i])) {
      ++i;
      continue;
    }
    word.clear();
    while (i < s.size() && is_letter(s[i])) word.push_back(to_lower(s[i++]));
    fn(std::string_view(word));
  }
}

inline std::uint64_t count_words(std::string_view s) {
  std::uint64_t n = 0;
  for_each_word(s, [&](std::string_view) { ++n; });
  return n;
}

// Bag of case-folded words.
using WordCounts = std::map<std::string, std::uint64_t, std::less<>>;

inline WordCounts word_counts(std::string_view s) {
  WordCounts counts;
  for_each_word(s, [&](std::string_view w) {
    auto it = counts.find(w);
    if (it == counts.end()) counts.emplace(std::string(w), 1);
    else ++it->second;
  });
  return counts;
}

// Replaces every byte that is not part of a well-formed UTF-8 sequence with U+FFFD.
// Overlong forms, surrogates and code points above U+10FFFF count as malformed.
inline std::string sanitize_utf8(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  constexpr std::string_view kReplacement = "\xEF\xBF\xBD";
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(in[i]); };
  std::size_t i = 0;
  while (i < in.size()) {
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
      out.push_back(static_cast<char>(b0));
      ++i;
      continue;
    }
    std::size_t len = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
      len = 2;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
      len = 3;
      if (b0 == 0xE0) lo = 0xA0;
      if (b0 == 0xED) hi = 0x9F;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
      len = 4;
      if (b0 == 0xF0) lo = 0x90;
      if (b0 == 0xF4) hi = 0x8F;
    }
    bool ok = len != 0 && i + len <= in.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const unsigned char b = byte(i + k);
      const unsigned char min = (k == 1) ? lo : 0x80;
      const unsigned char max = (k == 1) ? hi : 0xBF;
      ok = b >= min && b <= max;
    }
    if (ok) {
      out.append(in.substr(i, len));
      i += len;
    } else {
      out.append(kReplacement);
      ++i;
    }
  }
  return out;
}

}  // namespace texscope::text
