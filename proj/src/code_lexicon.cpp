#include "codevoice/code_lexicon.hpp"

#include "codevoice/text_util.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace codevoice::lexicon {

namespace {

constexpr std::array<std::string_view, 44> kCKeywords = {
    "auto",     "break",    "case",     "char",         "const",          "continue",      "default",
    "do",       "double",   "else",     "enum",         "extern",         "float",         "for",
    "goto",     "if",       "inline",   "int",          "long",           "register",      "restrict",
    "return",   "short",    "signed",   "sizeof",       "static",         "struct",        "switch",
    "typedef",  "union",    "unsigned", "void",         "volatile",       "while",         "_Alignas",
    "_Alignof", "_Atomic",  "_Bool",    "_Complex",     "_Generic",       "_Imaginary",    "_Noreturn",
    "_Static_assert", "_Thread_local",
};

constexpr std::array<std::string_view, 35> kPythonKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",     "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",       "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",      "while",  "with",  "yield",
};

bool is_c_string_prefix(std::string_view ident) {
  return ident == "L" || ident == "u" || ident == "U" || ident == "u8";
}

bool is_python_string_prefix(std::string_view ident) {
  const std::string lower = text::to_lower_ascii(ident);
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" || lower == "rb" ||
         lower == "fr" || lower == "rf";
}

bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }

// Soundex digit for an uppercase ASCII letter.
char soundex_code(char c) {
  switch (c) {
    case 'B': case 'F': case 'P': case 'V':
      return '1';
    case 'C': case 'G': case 'J': case 'K': case 'Q': case 'S': case 'X': case 'Z':
      return '2';
    case 'D': case 'T':
      return '3';
    case 'L':
      return '4';
    case 'M': case 'N':
      return '5';
    case 'R':
      return '6';
    default:
      return '0';
  }
}

// Emits identifier-shaped tokens from code using one of the three scanning
// modes. `sink(token)` receives each token.
class Scanner {
 public:
  Scanner(std::string_view code, SourceLanguage lang) : code_(code), lang_(lang) {}

  template <class Sink>
  void run(Sink&& sink) {
    if (lang_ == SourceLanguage::Unknown) {
      plain_scan(0, sink);
      return;
    }
    std::size_t i = 0;
    const std::size_t n = code_.size();
    while (i < n) {
      const char c = code_[i];
      if (lang_ == SourceLanguage::C && c == '/' && i + 1 < n && code_[i + 1] == '/') {
        i = skip_line(i);
      } else if (lang_ == SourceLanguage::C && c == '/' && i + 1 < n && code_[i + 1] == '*') {
        const auto end = code_.find("*/", i + 2);
        if (end == std::string_view::npos) {
          plain_scan(i + 2, sink);
          return;
        }
        i = end + 2;
      } else if (lang_ == SourceLanguage::Python && c == '#') {
        i = skip_line(i);
      } else if (c == '"' || c == '\'') {
        const auto next = skip_string(i);
        if (!next) {
          plain_scan(i, sink);
          return;
        }
        i = *next;
      } else if (text::is_digit_ascii(c)) {
        while (i < n && (text::is_ident_char(code_[i]) || code_[i] == '.' || is_high(code_[i]))) ++i;
      } else if (text::is_ident_char(c) || is_high(c)) {
        const std::size_t start = i;
        bool ascii = true;
        while (i < n && (text::is_ident_char(code_[i]) || is_high(code_[i]))) {
          if (is_high(code_[i])) ascii = false;
          ++i;
        }
        const std::string_view word = code_.substr(start, i - start);
        if (!ascii) continue;
        if (i < n && (code_[i] == '"' || code_[i] == '\'')) {
          const bool prefix = lang_ == SourceLanguage::C ? is_c_string_prefix(word) : is_python_string_prefix(word);
          if (prefix) continue;  // the literal itself is skipped on the next iteration
        }
        sink(std::string(word));
      } else {
        ++i;
      }
    }
  }

 private:
  std::size_t skip_line(std::size_t i) const {
    const auto nl = code_.find('\n', i);
    return nl == std::string_view::npos ? code_.size() : nl + 1;
  }

  // Returns the index past the closing quote, or nullopt for an unterminated
  // triple-quoted Python string.
  std::optional<std::size_t> skip_string(std::size_t i) const {
    const char q = code_[i];
    const std::size_t n = code_.size();
    if (lang_ == SourceLanguage::Python && i + 2 < n && code_[i + 1] == q && code_[i + 2] == q) {
      std::size_t j = i + 3;
      while (j < n) {
        if (code_[j] == '\\') {
          j += 2;
          continue;
        }
        if (code_[j] == q && j + 2 < n && code_[j + 1] == q && code_[j + 2] == q) return j + 3;
        ++j;
      }
      return std::nullopt;
    }
    std::size_t j = i + 1;
    while (j < n) {
      if (code_[j] == '\\') {
        j += 2;
        continue;
      }
      if (code_[j] == q) return j + 1;
      if (code_[j] == '\n') return j;  // unterminated single-line literal ends at the line
      ++j;
    }
    return n;
  }

  // [A-Za-z_][A-Za-z0-9_]* over raw bytes, ignoring comments and strings.
  template <class Sink>
  void plain_scan(std::size_t i, Sink&& sink) const {
    const std::size_t n = code_.size();
    while (i < n) {
      const char c = code_[i];
      if (text::is_alpha_ascii(c) || c == '_') {
        const std::size_t start = i;
        while (i < n && text::is_ident_char(code_[i])) ++i;
        sink(std::string(code_.substr(start, i - start)));
      } else {
        ++i;
      }
    }
  }

  std::string_view code_;
  SourceLanguage lang_;
};

}  // namespace

std::string_view to_string(SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::C:
      return "C";
    case SourceLanguage::Python:
      return "PYTHON";
    case SourceLanguage::Unknown:
      break;
  }
  return "UNKNOWN";
}

std::optional<SourceLanguage> parse_source_language(std::string_view text) {
  const std::string upper = text::to_upper_ascii(text);
  if (upper == "C") return SourceLanguage::C;
  if (upper == "PYTHON") return SourceLanguage::Python;
  if (upper == "UNKNOWN") return SourceLanguage::Unknown;
  return std::nullopt;
}

SourceLanguage detect_source_language(std::string_view code) {
  int c_score = 0;
  int py_score = 0;
  std::size_t pos = 0;
  while (pos < code.size()) {
    auto nl = code.find('\n', pos);
    if (nl == std::string_view::npos) nl = code.size();
    std::string_view line = code.substr(pos, nl - pos);
    pos = nl + 1;
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.remove_suffix(1);
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty()) continue;
    if (line.back() == ';' || line.back() == '{' || line.back() == '}') ++c_score;
    if (line.back() == ':') ++py_score;
    if (line.starts_with("#include") || line.starts_with("#define")) c_score += 2;
    if (line.starts_with("def ") || line.starts_with("import ") || line.starts_with("elif ") ||
        (line.starts_with("from ") && line.find(" import ") != std::string_view::npos)) {
      py_score += 2;
    }
  }
  if (c_score > py_score) return SourceLanguage::C;
  if (py_score > c_score) return SourceLanguage::Python;
  return SourceLanguage::Unknown;
}

bool is_keyword(std::string_view token, SourceLanguage lang) {
  switch (lang) {
    case SourceLanguage::C:
      return std::find(kCKeywords.begin(), kCKeywords.end(), token) != kCKeywords.end();
    case SourceLanguage::Python:
      return std::find(kPythonKeywords.begin(), kPythonKeywords.end(), token) != kPythonKeywords.end();
    case SourceLanguage::Unknown:
      break;
  }
  return false;
}

std::string phonetic_key(std::string_view token) {
  if (token.empty()) throw std::invalid_argument("phonetic_key: empty token");
  const std::string upper = text::to_upper_ascii(token);

  std::string segment;
  std::string digits;
  bool segment_done = false;
  for (const char c : upper) {
    if (text::is_digit_ascii(c)) {
      digits += c;
      if (!segment.empty()) segment_done = true;
    } else if (text::is_alpha_ascii(c)) {
      if (!segment_done) segment += c;
    } else if (!segment.empty()) {
      segment_done = true;
    }
  }
  if (segment.empty()) return digits;

  std::string key(1, segment.front());
  char last = '\0';
  std::string codes;
  for (std::size_t i = 1; i < segment.size(); ++i) {
    const char code = soundex_code(segment[i]);
    if (code == last) continue;
    last = code;
    if (code != '0') codes += code;
  }
  key += codes.substr(0, 3);
  return key + digits;
}

void CodeVocabulary::add(const std::string& token, bool keyword) {
  if (token.empty()) return;
  if (keyword) {
    identifiers_.erase(token);
    keywords_.insert(token);
  } else {
    if (keywords_.count(token)) return;
    identifiers_.insert(token);
  }
  phonetic_index_[phonetic_key(token)].insert(token);
  canonical_casing_.try_emplace(text::to_lower_ascii(token), token);
}

CodeVocabulary CodeVocabulary::from_tokens(const std::vector<std::string>& identifiers,
                                           const std::vector<std::string>& keywords) {
  CodeVocabulary v;
  for (const auto& t : keywords) v.add(t, true);
  for (const auto& t : identifiers) v.add(t, false);
  return v;
}

bool CodeVocabulary::contains(std::string_view token) const {
  return canonical_casing_.count(text::to_lower_ascii(token)) > 0;
}

std::optional<std::string> CodeVocabulary::canonical(std::string_view token) const {
  const auto it = canonical_casing_.find(text::to_lower_ascii(token));
  if (it == canonical_casing_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> CodeVocabulary::tokens() const {
  std::vector<std::string> out(identifiers_.begin(), identifiers_.end());
  out.insert(out.end(), keywords_.begin(), keywords_.end());
  std::sort(out.begin(), out.end());
  return out;
}

CodeVocabulary extract_vocabulary(std::string_view code, SourceLanguage lang) {
  CodeVocabulary vocab;
  Scanner scanner(code, lang);
  scanner.run([&](std::string token) { vocab.add(token, is_keyword(token, lang)); });
  return vocab;
}

std::vector<std::string> lookup_phonetic(const CodeVocabulary& vocab, std::string_view heard) {
  if (heard.empty()) return {};
  const auto it = vocab.phonetic_index().find(phonetic_key(heard));
  if (it == vocab.phonetic_index().end()) return {};

  const std::string lowered = text::to_lower_ascii(heard);
  std::vector<std::pair<std::size_t, std::string>> ranked;
  ranked.reserve(it->second.size());
  for (const auto& candidate : it->second) {
    ranked.emplace_back(text::levenshtein(lowered, text::to_lower_ascii(candidate)), candidate);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (auto& [dist, token] : ranked) out.push_back(std::move(token));
  return out;
}

}  // namespace codevoice::lexicon
