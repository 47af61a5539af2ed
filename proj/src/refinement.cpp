#include "codevoice/refinement.hpp"

#include "codevoice/text_util.hpp"

#include <stdexcept>

namespace codevoice::refine {

namespace {

Script classify(std::string_view token) {
  for (const char c : token) {
    if (static_cast<unsigned char>(c) >= 0x80) return Script::Native;
  }
  return Script::Latin;
}

std::string join_texts(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

bool is_identifier_word(std::string_view s) {
  bool has_letter = false;
  for (const char c : s) {
    if (!text::is_ident_char(c)) return false;
    if (text::is_alpha_ascii(c)) has_letter = true;
  }
  return has_letter;
}

void append_tokens(std::vector<Token>& out, std::string_view text) {
  for (auto& piece : text::split_whitespace(text)) {
    const Script s = classify(piece);
    out.push_back(Token{std::move(piece), s});
  }
}

// Longest-first, left-to-right phrase replacement over Latin tokens.
// `blocked(tokens, begin, end)` may veto a match.
template <class Table, class Blocked>
PassResult replace_phrases(std::vector<Token> tokens, const Table& table, EditRule rule, Blocked&& blocked) {
  PassResult result;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    bool matched = false;
    if (tokens[i].script == Script::Latin && table.max_words() > 0) {
      const std::size_t widest = std::min(table.max_words(), n - i);
      for (std::size_t w = widest; w >= 1 && !matched; --w) {
        std::string phrase;
        bool latin = true;
        for (std::size_t k = i; k < i + w; ++k) {
          if (tokens[k].script != Script::Latin) {
            latin = false;
            break;
          }
          if (k > i) phrase += ' ';
          phrase += text::to_lower_ascii(tokens[k].text);
        }
        if (!latin) continue;
        const std::string* value = table.find(phrase);
        if (!value) continue;
        const std::string original = join_texts(tokens, i, i + w);
        if (*value == original || blocked(tokens, i, i + w)) continue;
        result.edits.push_back(Edit{result.tokens.size(), result.tokens.size() + w, original, *value, rule});
        append_tokens(result.tokens, *value);
        i += w;
        matched = true;
      }
    }
    if (!matched) {
      result.tokens.push_back(tokens[i]);  // guards look back at tokens[i - 1]
      ++i;
    }
  }
  return result;
}

bool is_underscore(const Token& t) { return t.text == "_"; }

bool next_to_underscore(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
  return (begin > 0 && is_underscore(tokens[begin - 1])) || (end < tokens.size() && is_underscore(tokens[end]));
}

std::string normalize_phrase(std::string_view phrase) { return text::to_lower_ascii(text::normalize_spaces(phrase)); }

// Words the symbol and confusion passes react to. A phonetic repair never
// produces one of them.
std::set<std::string> phrase_words(const RuleTables& tables) {
  std::set<std::string> words;
  for (const auto& [phrase, value] : tables.symbols.entries()) {
    for (auto& w : text::split_whitespace(phrase)) words.insert(std::move(w));
  }
  for (const auto& [phrase, value] : tables.confusions.entries()) {
    for (auto& w : text::split_whitespace(phrase)) words.insert(std::move(w));
  }
  return words;
}

// Table outputs; the phonetic pass leaves them alone.
std::set<std::string> reserved_terms(const RuleTables& tables) {
  std::set<std::string> terms;
  for (const auto& [phrase, value] : tables.symbols.entries()) terms.insert(text::to_lower_ascii(value));
  for (const auto& [phrase, value] : tables.confusions.entries()) terms.insert(text::to_lower_ascii(value));
  return terms;
}

template <class Tag>
void load_into(PhraseTable<Tag>& table, std::istream& in, std::size_t max_words) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = text::normalize_spaces(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("phrase table line " + std::to_string(line_no) + ": expected '<phrase>\\t<replacement>'");
    }
    const std::string phrase = normalize_phrase(line.substr(0, tab));
    const std::string replacement = text::normalize_spaces(line.substr(tab + 1));
    if (phrase.empty() || replacement.empty()) {
      throw std::runtime_error("phrase table line " + std::to_string(line_no) + ": empty phrase or replacement");
    }
    if (max_words && text::split_whitespace(phrase).size() > max_words) {
      throw std::runtime_error("phrase table line " + std::to_string(line_no) + ": phrase longer than " +
                               std::to_string(max_words) + " words");
    }
    table.set(phrase, replacement);
  }
}

}  // namespace

std::string_view to_string(EditRule rule) {
  switch (rule) {
    case EditRule::Symbol:
      return "SYMBOL";
    case EditRule::Join:
      return "JOIN";
    case EditRule::Confusion:
      return "CONFUSION";
    case EditRule::Phonetic:
      return "PHONETIC";
    case EditRule::Llm:
      break;
  }
  return "LLM";
}

template <class Tag>
void PhraseTable<Tag>::set(std::string_view phrase, std::string replacement) {
  std::string key = normalize_phrase(phrase);
  if (key.empty()) throw std::invalid_argument("empty phrase");
  max_words_ = std::max(max_words_, text::split_whitespace(key).size());
  entries_[std::move(key)] = std::move(replacement);
}

template <class Tag>
const std::string* PhraseTable<Tag>::find(std::string_view normalized_phrase) const {
  const auto it = entries_.find(std::string(normalized_phrase));
  return it == entries_.end() ? nullptr : &it->second;
}

template class PhraseTable<SymbolTag>;
template class PhraseTable<ConfusionTag>;

SymbolTable builtin_symbols() {
  SymbolTable t;
  t.set("underscore", "_");
  t.set("dot", ".");
  t.set("comma", ",");
  t.set("semicolon", ";");
  t.set("equals", "=");
  t.set("equal to", "=");
  t.set("double equals", "==");
  t.set("plus", "+");
  t.set("minus", "-");
  t.set("star", "*");
  t.set("open bracket", "(");
  t.set("close bracket", ")");
  t.set("open brace", "{");
  t.set("close brace", "}");
  return t;
}

ConfusionTable builtin_confusions() {
  ConfusionTable t;
  t.set("ask key", "ASCII");
  return t;
}

void load_phrases(SymbolTable& table, std::istream& in) { load_into(table, in, 3); }
void load_phrases(ConfusionTable& table, std::istream& in) { load_into(table, in, 0); }

std::set<std::string> default_protected_words() {
  return {"the", "a",  "an",   "of",  "in",   "on",  "at",   "is",   "are", "was", "to",  "do",  "does",
          "it",  "this", "that", "what", "why", "how", "when", "and", "or",  "not", "be",  "can", "will"};
}

const std::vector<std::string>& refinement_goals() {
  static const std::vector<std::string> goals = {"restore code terms", "fix phonetic distortions",
                                                 "recover symbols", "disambiguate usage"};
  return goals;
}

std::vector<Token> tokenize_transcript(std::string_view text) {
  std::vector<Token> out;
  append_tokens(out, text);
  return out;
}

std::string detokenize(const std::vector<Token>& tokens) { return join_texts(tokens, 0, tokens.size()); }

PassResult normalize_symbols(std::vector<Token> tokens, const SymbolTable& table,
                             const lexicon::CodeVocabulary& vocab) {
  PassResult symbols =
      replace_phrases(std::move(tokens), table, EditRule::Symbol, [](const auto&, std::size_t, std::size_t) {
        return false;
      });

  // Join pass: at each position take the longest `w _ w _ w ...` chain whose
  // underscore concatenation is a vocabulary token.
  PassResult result;
  result.edits = std::move(symbols.edits);
  auto& in = symbols.tokens;
  const std::size_t n = in.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t best_len = 0;
    std::string best;
    if (in[i].script == Script::Latin) {
      std::string concat = text::to_lower_ascii(in[i].text);
      for (std::size_t k = 1; i + 2 * k < n && is_underscore(in[i + 2 * k - 1]) &&
                              in[i + 2 * k].script == Script::Latin;
           ++k) {
        concat += '_';
        concat += text::to_lower_ascii(in[i + 2 * k].text);
        if (vocab.contains(concat)) {
          best_len = 2 * k + 1;
          best = concat;
        }
      }
    }
    if (best_len == 0) {
      result.tokens.push_back(std::move(in[i]));
      ++i;
      continue;
    }
    std::string merged = *vocab.canonical(best);
    result.edits.push_back(Edit{result.tokens.size(), result.tokens.size() + best_len, join_texts(in, i, i + best_len),
                                merged, EditRule::Join});
    result.tokens.push_back(Token{std::move(merged), Script::Latin});
    i += best_len;
  }
  return result;
}

PassResult apply_confusions(std::vector<Token> tokens, const ConfusionTable& table) {
  // A phrase glued to an unresolved underscore belongs to a composite name.
  return replace_phrases(std::move(tokens), table, EditRule::Confusion, next_to_underscore);
}

PassResult restore_code_terms(std::vector<Token> tokens, const lexicon::CodeVocabulary& vocab,
                              const RefinementConfig& cfg) {
  PassResult result;
  if (vocab.empty()) {
    result.tokens = std::move(tokens);
    return result;
  }
  const auto refused = phrase_words(cfg.tables);
  const auto reserved = reserved_terms(cfg.tables);

  result.tokens = std::move(tokens);
  auto& seq = result.tokens;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Token& tok = seq[i];
    if (tok.script != Script::Latin || !is_identifier_word(tok.text)) continue;
    const std::string lower = text::to_lower_ascii(tok.text);
    if (vocab.contains(lower) || cfg.protected_words.count(lower) || reserved.count(lower)) continue;
    if (next_to_underscore(seq, i, i + 1)) continue;

    const auto candidates = lexicon::lookup_phonetic(vocab, tok.text);
    if (candidates.empty()) continue;
    const std::string& best = candidates.front();
    const std::string best_lower = text::to_lower_ascii(best);
    if (candidates.size() > 1) {
      // Several sound-alikes: require a strict winner within the threshold.
      const std::size_t d0 = text::levenshtein(lower, best_lower);
      const std::size_t d1 = text::levenshtein(lower, text::to_lower_ascii(candidates[1]));
      if (d0 == d1) continue;
      const double norm = static_cast<double>(d0) / static_cast<double>(std::max(lower.size(), best_lower.size()));
      if (norm > cfg.max_normalized_edit_distance) continue;
    }
    if (refused.count(best_lower)) continue;
    result.edits.push_back(Edit{i, i + 1, tok.text, best, EditRule::Phonetic});
    seq[i].text = best;
  }
  return result;
}

RefinedTranscript refine(const RawTranscript& raw, const lexicon::CodeVocabulary& vocab, const RefinementConfig& cfg,
                         const LlmRefiner* llm, std::string_view code) {
  RefinedTranscript out;
  out.source = raw;

  PassResult symbols = normalize_symbols(tokenize_transcript(raw.text), cfg.tables.symbols, vocab);
  PassResult confusions = apply_confusions(std::move(symbols.tokens), cfg.tables.confusions);
  PassResult terms = restore_code_terms(std::move(confusions.tokens), vocab, cfg);

  for (auto* pass : {&symbols, &confusions, &terms}) {
    for (auto& e : pass->edits) out.edits.push_back(std::move(e));
  }
  out.text = detokenize(terms.tokens);
  if (out.edits.empty()) out.text = raw.text;

  if (cfg.llm_pass_enabled && llm && *llm) {
    try {
      const std::string answer = (*llm)(out.text, code, raw.language);
      const std::string normalized = detokenize(tokenize_transcript(answer));
      if (normalized.empty()) throw std::runtime_error("empty refiner output");
      if (normalized != out.text) {
        out.edits.push_back(Edit{0, terms.tokens.size(), detokenize(terms.tokens), normalized, EditRule::Llm});
        out.text = normalized;
      }
    } catch (const std::exception& e) {
      out.degradation = std::string("llm refinement skipped: ") + e.what();
    }
  }
  return out;
}

RefinedTranscript refine(const RawTranscript& raw, std::string_view code, lexicon::SourceLanguage code_lang,
                         const RefinementConfig& cfg, const LlmRefiner* llm) {
  return refine(raw, lexicon::extract_vocabulary(code, code_lang), cfg, llm, code);
}

std::vector<std::string> apply_edits(std::vector<std::string> tokens, const std::vector<Edit>& edits) {
  for (const auto& e : edits) {
    if (e.start > e.end || e.end > tokens.size()) throw std::logic_error("edit span out of range");
    std::string current;
    for (std::size_t i = e.start; i < e.end; ++i) {
      if (i > e.start) current += ' ';
      current += tokens[i];
    }
    if (current != e.original) throw std::logic_error("edit original mismatch: '" + current + "' vs '" + e.original + "'");
    auto replacement = text::split_whitespace(e.replacement);
    tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(e.start), tokens.begin() + static_cast<std::ptrdiff_t>(e.end));
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(e.start), replacement.begin(), replacement.end());
  }
  return tokens;
}

}  // namespace codevoice::refine
