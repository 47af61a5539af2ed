#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace codevoice {

/// Spoken query language. English plus nine Indic languages; nothing else is
/// accepted at the API boundary.
enum class LanguageTag {
  English,
  Hindi,
  Marathi,
  Gujarati,
  Tamil,
  Telugu,
  Bengali,
  Malayalam,
  Kannada,
  Odia,
};

inline constexpr std::array<LanguageTag, 10> kAllLanguages = {
    LanguageTag::English, LanguageTag::Hindi,   LanguageTag::Marathi,   LanguageTag::Gujarati,
    LanguageTag::Tamil,   LanguageTag::Telugu,  LanguageTag::Bengali,   LanguageTag::Malayalam,
    LanguageTag::Kannada, LanguageTag::Odia,
};

/// Two-letter tag ("en", "hi", ..., "or").
std::string_view to_string(LanguageTag tag);

/// Exact, case-sensitive match against the ten tags.
std::optional<LanguageTag> parse_language(std::string_view text);

}  // namespace codevoice
