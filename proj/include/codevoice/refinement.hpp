#pragma once

#include "codevoice/code_lexicon.hpp"
#include "codevoice/language.hpp"

#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace codevoice::refine {

enum class Script { Latin, Native };

struct Token {
  std::string text;
  Script script = Script::Latin;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class EditRule { Symbol, Join, Confusion, Phonetic, Llm };

std::string_view to_string(EditRule rule);  // "SYMBOL", "JOIN", ...

/// One rewrite of the token stream. The span is half-open and refers to the
/// token sequence as it stands just before this edit is applied, i.e. after
/// all earlier edits of the same transcript. Within one rule pass spans are
/// ascending and non-overlapping.
struct Edit {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string original;     // tokens [start, end) joined by single spaces
  std::string replacement;  // may expand to several tokens (LLM pass)
  EditRule rule = EditRule::Symbol;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct RawTranscript {
  std::string text;
  LanguageTag language = LanguageTag::English;
  std::string provider_id;
};

struct RefinedTranscript {
  std::string text;
  std::vector<Edit> edits;
  RawTranscript source;
  /// Set when the optional LLM pass failed and the rule result was kept.
  std::optional<std::string> degradation;
};

/// Spoken phrase -> replacement, keyed by lowercased single-spaced phrase.
/// Lookups are longest-phrase-first by the passes that use the table.
template <class Tag>
class PhraseTable {
 public:
  void set(std::string_view phrase, std::string replacement);
  const std::string* find(std::string_view normalized_phrase) const;
  std::size_t max_words() const { return max_words_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
  std::size_t max_words_ = 0;
};

struct SymbolTag {};
struct ConfusionTag {};
using SymbolTable = PhraseTable<SymbolTag>;
using ConfusionTable = PhraseTable<ConfusionTag>;

SymbolTable builtin_symbols();
ConfusionTable builtin_confusions();

/// Reads `spoken phrase<TAB>replacement` lines; '#' starts a comment line.
/// File entries extend or override what the table already holds. Throws
/// std::runtime_error naming the line on malformed input; symbol phrases
/// must be 1-3 words.
void load_phrases(SymbolTable& table, std::istream& in);
void load_phrases(ConfusionTable& table, std::istream& in);

struct RuleTables {
  SymbolTable symbols = builtin_symbols();
  ConfusionTable confusions = builtin_confusions();
};

std::set<std::string> default_protected_words();

struct RefinementConfig {
  double max_normalized_edit_distance = 0.34;
  std::set<std::string> protected_words = default_protected_words();
  bool llm_pass_enabled = false;
  RuleTables tables;
};

/// Optional final pass. Receives the rule-refined text, the code, and the
/// query language; returns replacement text or throws.
using LlmRefiner = std::function<std::string(std::string_view text, std::string_view code, LanguageTag lang)>;

struct PassResult {
  std::vector<Token> tokens;
  std::vector<Edit> edits;
};

std::vector<Token> tokenize_transcript(std::string_view text);
std::string detokenize(const std::vector<Token>& tokens);

PassResult normalize_symbols(std::vector<Token> tokens, const SymbolTable& table,
                             const lexicon::CodeVocabulary& vocab);
PassResult apply_confusions(std::vector<Token> tokens, const ConfusionTable& table);
PassResult restore_code_terms(std::vector<Token> tokens, const lexicon::CodeVocabulary& vocab,
                              const RefinementConfig& cfg);

RefinedTranscript refine(const RawTranscript& raw, const lexicon::CodeVocabulary& vocab,
                         const RefinementConfig& cfg, const LlmRefiner* llm = nullptr,
                         std::string_view code = {});
RefinedTranscript refine(const RawTranscript& raw, std::string_view code, lexicon::SourceLanguage code_lang,
                         const RefinementConfig& cfg, const LlmRefiner* llm = nullptr);

/// Replays edits over a raw token sequence. Throws std::logic_error when an
/// edit's span or original text does not match the sequence.
std::vector<std::string> apply_edits(std::vector<std::string> tokens, const std::vector<Edit>& edits);

/// The instruction sent with every LLM refinement request.
const std::vector<std::string>& refinement_goals();

}  // namespace codevoice::refine
