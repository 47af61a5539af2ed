#include "codevoice/refinement.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "adapters.hpp"

using namespace codevoice;
using namespace codevoice::refine;
using lexicon::CodeVocabulary;
using lexicon::SourceLanguage;

namespace {

std::vector<Token> latin(std::initializer_list<const char*> words) {
  std::vector<Token> out;
  for (const char* w : words) out.push_back(Token{w, Script::Latin});
  return out;
}

std::vector<std::string> texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

using Words = std::vector<std::string>;

}  // namespace

TEST(Tokenize, Examples) {
  const auto a = tokenize_transcript("sum of array");
  ASSERT_EQ(a.size(), 3u);
  for (const auto& t : a) EXPECT_EQ(t.script, Script::Latin);

  const auto b = tokenize_transcript("array का sum");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].script, Script::Latin);
  EXPECT_EQ(b[1].script, Script::Native);
  EXPECT_EQ(b[1].text, "का");
  EXPECT_EQ(b[2].script, Script::Latin);

  EXPECT_TRUE(tokenize_transcript("").empty());
  EXPECT_EQ(texts(tokenize_transcript("print(x), done.")), (Words{"print(x),", "done."}));
}

TEST(Detokenize, SingleSpaces) {
  EXPECT_EQ(detokenize(tokenize_transcript("  array \t का   sum ")), "array का sum");
}

TEST(NormalizeSymbols, UnderscoreAlone) {
  const auto r = normalize_symbols(latin({"underscore"}), builtin_symbols(), CodeVocabulary{});
  EXPECT_EQ(texts(r.tokens), (Words{"_"}));
  ASSERT_EQ(r.edits.size(), 1u);
  EXPECT_EQ(r.edits[0].rule, EditRule::Symbol);
  EXPECT_EQ(r.edits[0].original, "underscore");
  EXPECT_EQ(r.edits[0].replacement, "_");
}

TEST(NormalizeSymbols, SymbolThenJoin) {
  const auto vocab = CodeVocabulary::from_tokens({"count_ascii"});
  const auto r = normalize_symbols(latin({"count", "underscore", "ascii"}), builtin_symbols(), vocab);
  EXPECT_EQ(texts(r.tokens), (Words{"count_ascii"}));
  ASSERT_EQ(r.edits.size(), 2u);
  EXPECT_EQ(r.edits[0].rule, EditRule::Symbol);
  EXPECT_EQ(r.edits[0].start, 1u);
  EXPECT_EQ(r.edits[1].rule, EditRule::Join);
  EXPECT_EQ(r.edits[1].start, 0u);
  EXPECT_EQ(r.edits[1].end, 3u);
  EXPECT_EQ(r.edits[1].original, "count _ ascii");
  EXPECT_EQ(r.edits[1].replacement, "count_ascii");
}

TEST(NormalizeSymbols, NoSymbols) {
  const auto r = normalize_symbols(latin({"no", "symbols", "here"}), builtin_symbols(), CodeVocabulary{});
  EXPECT_EQ(texts(r.tokens), (Words{"no", "symbols", "here"}));
  EXPECT_TRUE(r.edits.empty());
}

TEST(NormalizeSymbols, LongestFirstAndCaseInsensitive) {
  const auto r = normalize_symbols(latin({"x", "Double", "EQUALS", "y", "equal", "to", "z"}), builtin_symbols(),
                                   CodeVocabulary{});
  EXPECT_EQ(texts(r.tokens), (Words{"x", "==", "y", "=", "z"}));
  EXPECT_EQ(r.edits.size(), 2u);
}

TEST(NormalizeSymbols, JoinUsesCanonicalCasingAndLongestChain) {
  const auto vocab = CodeVocabulary::from_tokens({"MAX_LEN", "max_len_total"});
  const auto r = normalize_symbols(latin({"max", "underscore", "len", "underscore", "total"}), builtin_symbols(), vocab);
  EXPECT_EQ(texts(r.tokens), (Words{"max_len_total"}));
  const auto r2 = normalize_symbols(latin({"max", "underscore", "len"}), builtin_symbols(), vocab);
  EXPECT_EQ(texts(r2.tokens), (Words{"MAX_LEN"}));
}

TEST(NormalizeSymbols, NativeTokensNeverMatch) {
  std::vector<Token> toks{{"x", Script::Latin}, {"underscore", Script::Native}};
  const auto r = normalize_symbols(toks, builtin_symbols(), CodeVocabulary{});
  EXPECT_TRUE(r.edits.empty());
}

TEST(ApplyConfusions, Examples) {
  const auto table = builtin_confusions();
  auto r = apply_confusions(latin({"what", "is", "ask", "key"}), table);
  EXPECT_EQ(texts(r.tokens), (Words{"what", "is", "ASCII"}));
  ASSERT_EQ(r.edits.size(), 1u);
  EXPECT_EQ(r.edits[0].rule, EditRule::Confusion);

  r = apply_confusions(latin({"ask", "me", "later"}), table);
  EXPECT_EQ(texts(r.tokens), (Words{"ask", "me", "later"}));
  EXPECT_TRUE(r.edits.empty());

  r = apply_confusions(latin({"ask", "key", "of", "ask", "key"}), table);
  EXPECT_EQ(texts(r.tokens), (Words{"ASCII", "of", "ASCII"}));
  ASSERT_EQ(r.edits.size(), 2u);
  EXPECT_EQ(r.edits[0].start, 0u);
  EXPECT_EQ(r.edits[1].start, 2u);  // after the first replacement
}

TEST(ApplyConfusions, ReplacementsAreNotRematched) {
  ConfusionTable t;
  t.set("a b", "a b c");
  const auto r = apply_confusions(latin({"a", "b"}), t);
  EXPECT_EQ(texts(r.tokens), (Words{"a", "b", "c"}));
  EXPECT_EQ(r.edits.size(), 1u);
}

TEST(RestoreCodeTerms, KeyEqualUniqueCandidateBypassesThreshold) {
  const auto vocab = CodeVocabulary::from_tokens({"sum", "array"});
  const auto r = restore_code_terms(latin({"some", "of", "array"}), vocab, RefinementConfig{});
  EXPECT_EQ(texts(r.tokens), (Words{"sum", "of", "array"}));
  ASSERT_EQ(r.edits.size(), 1u);
  EXPECT_EQ(r.edits[0].rule, EditRule::Phonetic);
  EXPECT_EQ(r.edits[0].original, "some");
}

TEST(RestoreCodeTerms, NativeAndKnownTokensUntouched) {
  std::vector<Token> toks{{"का", Script::Native}, {"sum", Script::Latin}};
  const auto r = restore_code_terms(toks, CodeVocabulary::from_tokens({"sum"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
}

TEST(RestoreCodeTerms, ProtectedWord) {
  const auto r = restore_code_terms(latin({"of"}), CodeVocabulary::from_tokens({"off_t"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
}

TEST(RestoreCodeTerms, AmbiguousTieLeavesToken) {
  const auto r = restore_code_terms(latin({"mip"}), CodeVocabulary::from_tokens({"map", "mop"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
}

TEST(RestoreCodeTerms, SeveralCandidatesNeedThreshold) {
  const auto vocab = CodeVocabulary::from_tokens({"mapper", "mopper"});
  // "mappor" -> mapper at 1/6, mopper at 2/6; all three key to M16.
  auto r = restore_code_terms(latin({"mappor"}), vocab, RefinementConfig{});
  EXPECT_EQ(texts(r.tokens), (Words{"mapper"}));
  RefinementConfig strict;
  strict.max_normalized_edit_distance = 0.1;
  r = restore_code_terms(latin({"mappor"}), vocab, strict);
  EXPECT_TRUE(r.edits.empty());
}

TEST(RestoreCodeTerms, UsesCanonicalCasing) {
  const auto r2 =
      restore_code_terms(latin({"boundodstack"}), CodeVocabulary::from_tokens({"BoundedStack"}), RefinementConfig{});
  EXPECT_EQ(texts(r2.tokens), (Words{"BoundedStack"}));
}

TEST(RestoreCodeTerms, GuardsAgainstTableWordsAndUnderscores) {
  // "dat" sounds like the vocabulary token "dot", which is a spoken symbol.
  auto r = restore_code_terms(latin({"dat"}), CodeVocabulary::from_tokens({"dot"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
  // Tokens glued to an unresolved underscore stay as spoken.
  r = restore_code_terms(latin({"sume", "_", "x"}), CodeVocabulary::from_tokens({"sum"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
  // Table outputs are never re-repaired.
  r = restore_code_terms(latin({"ASCII"}), CodeVocabulary::from_tokens({"asc"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
  // Punctuated tokens are left to the LLM pass.
  r = restore_code_terms(latin({"some,"}), CodeVocabulary::from_tokens({"sum"}), RefinementConfig{});
  EXPECT_TRUE(r.edits.empty());
}

TEST(Refine, CompositeExample) {
  const RawTranscript raw{"what is ask key of x underscore one", LanguageTag::Hindi, "test"};
  const auto r = refine::refine(raw, "int x_one;", SourceLanguage::C, RefinementConfig{});
  EXPECT_EQ(r.text, "what is ASCII of x_one");
  ASSERT_EQ(r.edits.size(), 3u);
  EXPECT_EQ(r.edits[0].rule, EditRule::Symbol);
  EXPECT_EQ(r.edits[1].rule, EditRule::Join);
  EXPECT_EQ(r.edits[2].rule, EditRule::Confusion);
  EXPECT_EQ(oracle::unwords(apply_edits(oracle::words(raw.text), r.edits)), r.text);
  EXPECT_FALSE(r.degradation.has_value());
}

TEST(Refine, IdentityAndEmpty) {
  const RawTranscript raw{"  hello   there  ", LanguageTag::English, "t"};
  const auto r = refine::refine(raw, "int x;", SourceLanguage::C, RefinementConfig{});
  EXPECT_EQ(r.text, raw.text);
  EXPECT_TRUE(r.edits.empty());
  const auto e = refine::refine(RawTranscript{"", LanguageTag::English, "t"}, "", SourceLanguage::C, RefinementConfig{});
  EXPECT_EQ(e.text, "");
  EXPECT_TRUE(e.edits.empty());
}

TEST(Refine, SomeOfArrayEndToEnd) {
  const RawTranscript raw{"some of array", LanguageTag::Hindi, "t"};
  const auto r = refine::refine(raw, "def f(array):\n    return sum(array)\n", SourceLanguage::Python, RefinementConfig{});
  EXPECT_EQ(r.text, "sum of array");
}

TEST(Refine, LlmPassReplacesWholeSpan) {
  RefinementConfig cfg;
  cfg.llm_pass_enabled = true;
  LlmRefiner llm = [](std::string_view text, std::string_view, LanguageTag) {
    return std::string(text) + "  please";
  };
  const RawTranscript raw{"what is ask key", LanguageTag::English, "t"};
  const auto r = refine::refine(raw, CodeVocabulary{}, cfg, &llm);
  EXPECT_EQ(r.text, "what is ASCII please");
  ASSERT_EQ(r.edits.size(), 2u);
  EXPECT_EQ(r.edits[1].rule, EditRule::Llm);
  EXPECT_EQ(r.edits[1].start, 0u);
  EXPECT_EQ(r.edits[1].end, 3u);
  EXPECT_EQ(oracle::unwords(apply_edits(oracle::words(raw.text), r.edits)), r.text);
}

TEST(Refine, LlmIdentityAddsNoEdit) {
  RefinementConfig cfg;
  cfg.llm_pass_enabled = true;
  LlmRefiner llm = [](std::string_view text, std::string_view, LanguageTag) { return std::string(text); };
  const auto r = refine::refine(RawTranscript{"sum of array", LanguageTag::English, "t"}, CodeVocabulary{}, cfg, &llm);
  EXPECT_TRUE(r.edits.empty());
}

TEST(Refine, LlmFailureDegradesGracefully) {
  RefinementConfig cfg;
  cfg.llm_pass_enabled = true;
  LlmRefiner boom = [](std::string_view, std::string_view, LanguageTag) -> std::string {
    throw std::runtime_error("provider down");
  };
  const auto r = refine::refine(RawTranscript{"what is ask key", LanguageTag::English, "t"}, CodeVocabulary{}, cfg, &boom);
  EXPECT_EQ(r.text, "what is ASCII");
  ASSERT_TRUE(r.degradation.has_value());
  EXPECT_NE(r.degradation->find("provider down"), std::string::npos);

  LlmRefiner empty = [](std::string_view, std::string_view, LanguageTag) { return std::string("  "); };
  const auto e = refine::refine(RawTranscript{"what is ask key", LanguageTag::English, "t"}, CodeVocabulary{}, cfg, &empty);
  EXPECT_EQ(e.text, "what is ASCII");
  EXPECT_TRUE(e.degradation.has_value());
}

TEST(Refine, LlmDisabledIsNotCalled) {
  bool called = false;
  LlmRefiner llm = [&](std::string_view t, std::string_view, LanguageTag) {
    called = true;
    return std::string(t);
  };
  refine::refine(RawTranscript{"x", LanguageTag::English, "t"}, CodeVocabulary{}, RefinementConfig{}, &llm);
  EXPECT_FALSE(called);
}

TEST(Refine, ConservatismWithEmptyVocabulary) {
  RefinementConfig cfg;
  cfg.tables.confusions = ConfusionTable{};
  const auto r = refine::refine(RawTranscript{"ask key some dot map underscore mop", LanguageTag::English, "t"},
                        CodeVocabulary{}, cfg);
  EXPECT_EQ(r.text, "ask key some . map _ mop");
  for (const auto& e : r.edits) EXPECT_EQ(e.rule, EditRule::Symbol);
}

TEST(ApplyEdits, RejectsMismatch) {
  EXPECT_THROW(apply_edits({"a", "b"}, {Edit{0, 1, "x", "y", EditRule::Symbol}}), std::logic_error);
  EXPECT_THROW(apply_edits({"a"}, {Edit{0, 2, "a", "y", EditRule::Symbol}}), std::logic_error);
}

TEST(PhraseTables, LoadFromTsv) {
  SymbolTable sym = builtin_symbols();
  std::istringstream in("# extra symbols\narrow\t->\nDouble  Colon\t::\n\n");
  load_phrases(sym, in);
  ASSERT_NE(sym.find("arrow"), nullptr);
  EXPECT_EQ(*sym.find("arrow"), "->");
  EXPECT_EQ(*sym.find("double colon"), "::");
  EXPECT_EQ(*sym.find("underscore"), "_");

  std::istringstream bad("ok\tfine\nno tab here\n");
  try {
    load_phrases(sym, bad);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream too_long("a b c d\tx\n");
  EXPECT_THROW(load_phrases(sym, too_long), std::runtime_error);

  ConfusionTable conf = builtin_confusions();
  std::istringstream c("ask key\tASCII code\nlink list\tlinked list\n");
  load_phrases(conf, c);
  EXPECT_EQ(*conf.find("ask key"), "ASCII code");
}

TEST(PhraseTables, BuiltinsAreComplete) {
  const auto s = builtin_symbols();
  EXPECT_EQ(s.size(), 14u);
  for (const auto& [phrase, value] :
       std::vector<std::pair<std::string, std::string>>{{"underscore", "_"},   {"dot", "."},       {"comma", ","},
                                                        {"semicolon", ";"},    {"equals", "="},    {"equal to", "="},
                                                        {"double equals", "=="}, {"plus", "+"},     {"minus", "-"},
                                                        {"star", "*"},         {"open bracket", "("}, {"close bracket", ")"},
                                                        {"open brace", "{"},   {"close brace", "}"}}) {
    ASSERT_NE(s.find(phrase), nullptr) << phrase;
    EXPECT_EQ(*s.find(phrase), value);
  }
  EXPECT_EQ(*builtin_confusions().find("ask key"), "ASCII");
  EXPECT_EQ(default_protected_words().size(), 26u);
  EXPECT_EQ(refinement_goals().size(), 4u);
}
