#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace codevoice::lexicon {

enum class SourceLanguage { C, Python, Unknown };

std::string_view to_string(SourceLanguage lang);  // "C", "PYTHON", "UNKNOWN"
std::optional<SourceLanguage> parse_source_language(std::string_view text);

/// Cheap guess used when a submission carries no explicit code language.
/// Returns Unknown when neither C nor Python signals dominate.
SourceLanguage detect_source_language(std::string_view code);

/// Code terms of one submission. Immutable once built; every token in
/// identifiers and keywords is indexed under its phonetic key, and
/// canonical_casing maps each lowercased token to its first-seen spelling.
class CodeVocabulary {
 public:
  CodeVocabulary() = default;

  /// Builds the index for an explicit token set (tests, fixtures). Tokens
  /// present in both sets are kept as keywords only.
  static CodeVocabulary from_tokens(const std::vector<std::string>& identifiers,
                                    const std::vector<std::string>& keywords = {});

  const std::set<std::string>& identifiers() const { return identifiers_; }
  const std::set<std::string>& keywords() const { return keywords_; }
  const std::map<std::string, std::set<std::string>>& phonetic_index() const { return phonetic_index_; }
  const std::map<std::string, std::string>& canonical_casing() const { return canonical_casing_; }

  bool empty() const { return identifiers_.empty() && keywords_.empty(); }
  std::size_t size() const { return identifiers_.size() + keywords_.size(); }

  /// Case-insensitive membership.
  bool contains(std::string_view token) const;

  /// First-seen spelling of a token, or nullopt when absent.
  std::optional<std::string> canonical(std::string_view token) const;

  /// identifiers ∪ keywords, sorted.
  std::vector<std::string> tokens() const;

 private:
  friend CodeVocabulary extract_vocabulary(std::string_view code, SourceLanguage lang);
  void add(const std::string& token, bool keyword);

  std::set<std::string> identifiers_;
  std::set<std::string> keywords_;
  std::map<std::string, std::set<std::string>> phonetic_index_;
  std::map<std::string, std::string> canonical_casing_;
};

/// Identifier-shaped tokens of `code`. Comments and string literals are
/// skipped for C and Python; Unknown is a plain identifier scan. Never throws
/// on malformed source: an unterminated block comment or triple-quoted string
/// makes the remainder fall back to the plain scan.
CodeVocabulary extract_vocabulary(std::string_view code, SourceLanguage lang);

bool is_keyword(std::string_view token, SourceLanguage lang);

/// Soundex-style key. Only the first alphabetic segment (split on
/// underscores and digits) is encoded; the token's digits are appended
/// verbatim. Throws std::invalid_argument on an empty token.
std::string phonetic_key(std::string_view token);

/// Vocabulary tokens sharing heard's phonetic key, ordered by Levenshtein
/// distance to heard (both lowercased), then lexicographically.
std::vector<std::string> lookup_phonetic(const CodeVocabulary& vocab, std::string_view heard);

}  // namespace codevoice::lexicon
