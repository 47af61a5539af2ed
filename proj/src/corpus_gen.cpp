#include "codevoice/corpus_gen.hpp"

#include "codevoice/refinement.hpp"
#include "codevoice/text_util.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace codevoice::eval {

namespace fs = std::filesystem;
using lexicon::SourceLanguage;

namespace {

enum class Corruption { Phonetic, Symbol, Confusion };

struct Snippet {
  std::string code;
  SourceLanguage lang;
  lexicon::CodeVocabulary vocab;
};

// {T} is the code term, {A} the spelled-out ASCII.
struct Templates {
  std::vector<std::string> plain;
  std::vector<std::string> ascii;
};

const std::map<LanguageTag, Templates>& templates() {
  static const std::map<LanguageTag, Templates> t{
      {LanguageTag::English,
       {{"what is wrong with {T}", "why does {T} give the wrong answer", "how do I print {T}",
         "can you explain {T} in this code", "where should I change {T}"},
        {"how do I print the {A} value of {T}", "why is the {A} code of {T} wrong"}}},
      {LanguageTag::Hindi,
       {{"{T} में क्या गलती है", "मेरा {T} सही नहीं चल रहा"}, {"{T} का {A} कैसे निकालें"}}},
      {LanguageTag::Marathi, {{"{T} मध्ये काय चूक आहे", "{T} बरोबर का नाही"}, {"{T} चा {A} कसा काढायचा"}}},
      {LanguageTag::Gujarati, {{"{T} માં શું ભૂલ છે", "{T} કેમ ખોટું છે"}, {"{T} નો {A} કેવી રીતે મળે"}}},
      {LanguageTag::Tamil, {{"{T} இல் என்ன பிழை", "{T} ஏன் வேலை செய்யவில்லை"}, {"{T} இன் {A} மதிப்பு என்ன"}}},
      {LanguageTag::Telugu, {{"{T} లో తప్పు ఏమిటి", "{T} ఎందుకు పని చేయడం లేదు"}, {"{T} యొక్క {A} విలువ ఏమిటి"}}},
      {LanguageTag::Bengali, {{"{T} এ কী ভুল", "{T} কেন কাজ করছে না"}, {"{T} এর {A} মান কত"}}},
      {LanguageTag::Malayalam, {{"{T} ൽ എന്താണ് തെറ്റ്", "{T} എന്തുകൊണ്ട് ശരിയല്ല"}, {"{T} ന്റെ {A} മൂല്യം എന്താണ്"}}},
      {LanguageTag::Kannada, {{"{T} ನಲ್ಲಿ ಏನು ತಪ್ಪು", "{T} ಯಾಕೆ ಕೆಲಸ ಮಾಡುತ್ತಿಲ್ಲ"}, {"{T} ನ {A} ಮೌಲ್ಯ ಏನು"}}},
      {LanguageTag::Odia, {{"{T} ରେ କଣ ଭୁଲ", "{T} କାହିଁକି କାମ କରୁନାହିଁ"}, {"{T} ର {A} ମୂଲ୍ୟ କଣ"}}},
  };
  return t;
}

std::string fill_template(std::string_view tmpl, std::string_view term, std::string_view ascii) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 3, "{T}") == 0) {
      out += term;
      i += 3;
    } else if (tmpl.compare(i, 3, "{A}") == 0) {
      out += ascii;
      i += 3;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

std::vector<Snippet> load_snippets(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".c" || ext == ".py") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Snippet> out;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto lang = path.extension() == ".c" ? SourceLanguage::C : SourceLanguage::Python;
    auto vocab = lexicon::extract_vocabulary(buf.str(), lang);
    if (vocab.identifiers().empty()) continue;
    out.push_back(Snippet{buf.str(), lang, std::move(vocab)});
  }
  return out;
}

bool letters_only(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return text::is_alpha_ascii(c); });
}

bool is_vowel(char c) {
  const char l = static_cast<char>(c | 0x20);
  return l == 'a' || l == 'e' || l == 'i' || l == 'o' || l == 'u';
}

// Words the engine treats specially: every word of a table phrase and the
// lowercase of every table value.
std::set<std::string> special_words(const refine::RuleTables& tables) {
  std::set<std::string> out;
  const auto add = [&](const auto& table) {
    for (const auto& [phrase, value] : table.entries()) {
      for (const auto& w : text::split_whitespace(phrase)) out.insert(w);
      out.insert(text::to_lower_ascii(value));
    }
  };
  add(tables.symbols);
  add(tables.confusions);
  return out;
}

class Generator {
 public:
  Generator(std::uint64_t seed, std::vector<Snippet> snippets)
      : rng_(seed), snippets_(std::move(snippets)), special_(special_words(cfg_.tables)) {}

  std::optional<EvalCase> attempt(Corruption kind) {
    const auto& snip = snippets_[pick(snippets_.size())];
    const auto lang = kAllLanguages[pick(kAllLanguages.size())];
    const auto& tmpls = templates().at(lang);

    std::string clean_term;
    std::string heard_term;
    std::string ascii_clean = "ASCII";
    std::string ascii_heard = "ASCII";
    const auto ids = std::vector<std::string>(snip.vocab.identifiers().begin(), snip.vocab.identifiers().end());

    switch (kind) {
      case Corruption::Phonetic: {
        std::vector<std::string> pool;
        for (const auto& id : ids) {
          if (id.size() < 3 || !letters_only(id)) continue;
          const auto it = snip.vocab.phonetic_index().find(lexicon::phonetic_key(id));
          if (it == snip.vocab.phonetic_index().end() || it->second.size() != 1) continue;
          pool.push_back(id);
        }
        if (pool.empty()) return std::nullopt;
        clean_term = pool[pick(pool.size())];
        std::vector<std::size_t> vowels;
        for (std::size_t i = 1; i < clean_term.size(); ++i) {
          if (is_vowel(clean_term[i])) vowels.push_back(i);
        }
        if (vowels.empty()) return std::nullopt;
        static constexpr std::array<char, 5> kVowels{'a', 'e', 'i', 'o', 'u'};
        heard_term = clean_term;
        const auto at = vowels[pick(vowels.size())];
        const char lower = static_cast<char>(clean_term[at] | 0x20);
        char repl = kVowels[pick(kVowels.size())];
        if (repl == lower) repl = kVowels[(static_cast<std::size_t>(std::find(kVowels.begin(), kVowels.end(), repl) -
                                                                     kVowels.begin()) +
                                            1) %
                                           kVowels.size()];
        heard_term[at] = (clean_term[at] & 0x20) ? repl : static_cast<char>(repl & ~0x20);
        const auto lower_heard = text::to_lower_ascii(heard_term);
        if (snip.vocab.contains(heard_term) || cfg_.protected_words.count(lower_heard) ||
            special_.count(lower_heard)) {
          return std::nullopt;
        }
        break;
      }
      case Corruption::Symbol: {
        std::vector<std::string> pool;
        for (const auto& id : ids) {
          if (id.find('_') == std::string::npos) continue;
          const auto parts = split_underscores(id);
          if (parts.empty()) continue;
          pool.push_back(id);
        }
        if (pool.empty()) return std::nullopt;
        clean_term = pool[pick(pool.size())];
        heard_term = text::join(split_underscores(clean_term), " underscore ");
        break;
      }
      case Corruption::Confusion:
        clean_term = ids[pick(ids.size())];
        heard_term = clean_term;
        ascii_heard = "ask key";
        break;
    }

    const auto& pool = kind == Corruption::Confusion ? tmpls.ascii : tmpls.plain;
    const auto& tmpl = pool[pick(pool.size())];
    EvalCase c;
    c.language = lang;
    c.code = snip.code;
    c.code_lang = snip.lang;
    c.expected_refined = fill_template(tmpl, clean_term, ascii_clean);
    c.corrupted_transcript = fill_template(tmpl, heard_term, ascii_heard);
    c.expected_terms = {clean_term};

    // The clean question must be a fixed point and the corrupted one must map
    // back onto it; otherwise a template word collides with this snippet.
    const auto& vocab = snip.vocab;
    const auto fixed = refine::refine({c.expected_refined, lang, "gen"}, vocab, cfg_);
    if (!fixed.edits.empty()) return std::nullopt;
    const auto repaired = refine::refine({c.corrupted_transcript, lang, "gen"}, vocab, cfg_);
    if (repaired.text != c.expected_refined) return std::nullopt;
    return c;
  }

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

 private:
  // Segments of a well-formed snake_case name, or empty when a segment is
  // empty or is itself a spoken table word.
  std::vector<std::string> split_underscores(const std::string& id) const {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto us = id.find('_', start);
      const auto part = id.substr(start, us == std::string::npos ? std::string::npos : us - start);
      if (part.empty() || special_.count(text::to_lower_ascii(part))) return {};
      parts.push_back(part);
      if (us == std::string::npos) break;
      start = us + 1;
    }
    return parts.size() >= 2 ? parts : std::vector<std::string>{};
  }

  std::mt19937_64 rng_;
  std::vector<Snippet> snippets_;
  refine::RefinementConfig cfg_;
  std::set<std::string> special_;
};

}  // namespace

std::vector<EvalCase> gen_corpus(std::uint64_t seed, std::size_t n, const fs::path& code_dir) {
  if (n == 0) throw std::invalid_argument("gen_corpus: n must be >= 1");
  auto snippets = load_snippets(code_dir);
  if (snippets.empty()) throw std::runtime_error("no usable *.c or *.py snippets in " + code_dir.string());

  Generator gen(seed, std::move(snippets));
  static constexpr std::array<Corruption, 3> kKinds{Corruption::Phonetic, Corruption::Symbol, Corruption::Confusion};
  constexpr int kMaxAttempts = 500;

  std::vector<EvalCase> cases;
  for (std::size_t i = 0; i < n; ++i) {
    // Kinds rotate so every corpus of three or more cases has all of them.
    const auto preferred = kKinds[i % kKinds.size()];
    std::optional<EvalCase> made;
    for (int attempt = 0; attempt < kMaxAttempts && !made; ++attempt) {
      const auto kind = attempt < kMaxAttempts / 2 ? preferred : kKinds[gen.pick(kKinds.size())];
      made = gen.attempt(kind);
    }
    if (!made) throw std::runtime_error("snippets in " + code_dir.string() + " cannot produce valid cases");
    char id[64];
    std::snprintf(id, sizeof id, "gen-%llu-%04zu", static_cast<unsigned long long>(seed), i + 1);
    made->id = id;
    cases.push_back(std::move(*made));
  }
  return cases;
}

}  // namespace codevoice::eval
