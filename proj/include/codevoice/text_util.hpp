#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codevoice::text {

bool is_valid_utf8(std::string_view bytes);

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

/// Splits on ASCII whitespace; empty fields are dropped.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_spaces(std::string_view s);

inline bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_alpha_ascii(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

inline bool is_digit_ascii(char c) { return c >= '0' && c <= '9'; }

/// Levenshtein distance over any two random-access sequences with
/// equality-comparable elements (characters or words).
template <class SeqA, class SeqB>
std::size_t levenshtein(const SeqA& a, const SeqB& b) {
  const std::size_t n = std::size(a);
  const std::size_t m = std::size(b);
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

/// ISO-8601 UTC with millisecond precision, e.g. "2025-01-02T03:04:05.678Z".
std::string format_utc(std::chrono::system_clock::time_point tp);

/// Inverse of format_utc; nullopt when the text is not in that form.
std::optional<std::chrono::system_clock::time_point> parse_utc(std::string_view text);

/// Random (version 4) UUID in canonical 8-4-4-4-12 lowercase hex form.
std::string make_uuid_v4();

bool looks_like_uuid(std::string_view s);

}  // namespace codevoice::text
