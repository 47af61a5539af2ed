#include "codevoice/eval.hpp"

#include <gtest/gtest.h>

#include "codevoice/corpus_gen.hpp"
#include "oracle.hpp"
#include "temp_dir.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace codevoice;
using namespace codevoice::eval;

namespace {

const std::filesystem::path kData = CODEVOICE_DATA_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CODEVOICE_EVAL_BIN) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string line_of(const EvalCase& c) { return to_json(c).dump() + "\n"; }

EvalCase identity_case(std::string id, std::string text) {
  EvalCase c;
  c.id = std::move(id);
  c.corrupted_transcript = text;
  c.expected_refined = text;
  c.code = "int total;";
  c.code_lang = lexicon::SourceLanguage::C;
  return c;
}

}  // namespace

TEST(Wer, HandComputed) {
  EXPECT_NEAR(wer("a b c", "a b c"), 0.0, 1e-12);
  EXPECT_NEAR(wer("a b c", "a x c"), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(wer("a b c", "a c"), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(wer("a b c", "a b c d"), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(wer("a b", "x y z"), 3.0 / 2.0, 1e-12);
  EXPECT_NEAR(wer("the cat sat on the mat", "the cat sit on mat"), 2.0 / 6.0, 1e-12);
  EXPECT_NEAR(wer("", ""), 0.0, 1e-12);
  EXPECT_NEAR(wer("", "hello"), 1.0, 1e-12);
  EXPECT_NEAR(wer("hello", ""), 1.0, 1e-12);
  // Whitespace runs do not count as words.
  EXPECT_NEAR(wer("  a   b ", "a b"), 0.0, 1e-12);
}

TEST(Corpus, RoundTrip) {
  auto c = identity_case("x1", "what is total");
  c.language = LanguageTag::Hindi;
  c.expected_terms = {"total"};
  const auto parsed = parse_corpus(line_of(c));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(to_json(parsed[0]), to_json(c));
  EXPECT_EQ(serialize_corpus(parsed), line_of(c));
}

TEST(Corpus, ErrorsCarryLineNumbers) {
  const std::string good = line_of(identity_case("a", "x"));
  try {
    parse_corpus(good + "\n" + "{not json\n");
    FAIL();
  } catch (const CorpusError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("corpus line 3"), std::string::npos);
  }
  auto bad_lang = to_json(identity_case("b", "x"));
  bad_lang["language"] = "fr";
  EXPECT_THROW(parse_corpus(bad_lang.dump()), CorpusError);
  auto missing = to_json(identity_case("c", "x"));
  missing.erase("expected_refined");
  EXPECT_THROW(parse_corpus(missing.dump()), CorpusError);
  auto stray_term = identity_case("d", "what is total");
  stray_term.expected_terms = {"count"};
  EXPECT_THROW(parse_corpus(line_of(stray_term)), CorpusError);
  auto bad_code_lang = to_json(identity_case("e", "x"));
  bad_code_lang["code_lang"] = "RUST";
  EXPECT_THROW(parse_corpus(bad_code_lang.dump()), CorpusError);
  try {
    parse_corpus(good + good);
    FAIL();
  } catch (const CorpusError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_corpus("\n\n"), CorpusError);
  EXPECT_THROW(load_corpus(kData / "no-such-corpus.jsonl"), std::runtime_error);
}

TEST(Eval, IdentityCorpusIsPerfect) {
  std::vector<EvalCase> cases{identity_case("b", "why is total zero"), identity_case("a", "what does total hold")};
  cases[0].expected_terms = {"total"};
  const auto r = run_eval(cases, AppConfig{}, EvalMode::RefineOnly);
  EXPECT_EQ(r.n_cases, 2u);
  EXPECT_EQ(r.exact_count, 2u);
  EXPECT_DOUBLE_EQ(r.exact_match_rate(), 1.0);
  EXPECT_DOUBLE_EQ(r.term_recovery_rate(), 1.0);
  EXPECT_DOUBLE_EQ(r.mean_wer_after, 0.0);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].id, "a");
  EXPECT_EQ(r.rows[1].id, "b");
}

TEST(Eval, RepairAndMetrics) {
  auto c = identity_case("r", "what is ASCII of x_one");
  c.corrupted_transcript = "what is ask key of x underscore one";
  c.code = "int x_one;";
  c.expected_terms = {"ASCII", "x_one"};
  auto miss = identity_case("m", "what is total");
  miss.corrupted_transcript = "what is botal";  // different key, unrepairable
  miss.expected_terms = {"total"};
  const auto r = run_eval({c, miss}, AppConfig{}, EvalMode::RefineOnly);
  EXPECT_EQ(r.exact_count, 1u);
  EXPECT_DOUBLE_EQ(r.exact_match_rate(), 0.5);
  EXPECT_EQ(r.terms_found, 2u);
  EXPECT_EQ(r.terms_total, 3u);
  EXPECT_NEAR(r.term_recovery_rate(), 2.0 / 3.0, 1e-12);
  const auto& row_r = r.rows[1];
  EXPECT_EQ(row_r.id, "r");
  EXPECT_EQ(row_r.refined, "what is ASCII of x_one");
  EXPECT_NEAR(row_r.wer_before, oracle::word_error_rate(c.expected_refined, c.corrupted_transcript), 1e-12);
  EXPECT_DOUBLE_EQ(row_r.wer_after, 0.0);
  EXPECT_EQ(row_r.edits, 3u);
  EXPECT_NEAR(r.rows[0].wer_after, 1.0 / 3.0, 1e-12);
}

TEST(Eval, ChecksumFixture) {
  const auto cases = load_corpus(kData / "corpus" / "checksum_96.jsonl");
  ASSERT_EQ(cases.size(), 96u);
  const auto r = run_eval(cases, AppConfig{}, EvalMode::RefineOnly);
  EXPECT_EQ(r.exact_count, 72u);
  EXPECT_EQ(r.exact_match_rate(), 0.75);
  EXPECT_EQ(report_to_json(r)["exact_match_rate_text"], "0.7500");
}

TEST(Eval, FullMockMatchesRefineOnly) {
  auto c = identity_case("r", "what is ASCII of x_one");
  c.corrupted_transcript = "what is ask key of x underscore one";
  c.code = "int x_one;";
  const auto r = run_eval({c}, AppConfig{}, EvalMode::FullMock);
  EXPECT_EQ(r.exact_count, 1u);
  EXPECT_EQ(r.tasks_succeeded, 1u);
  EXPECT_EQ(r.rows[0].task_state, "SUCCEEDED");
  EXPECT_TRUE(report_to_json(r).contains("tasks_succeeded"));
  EXPECT_FALSE(report_to_json(run_eval({c}, AppConfig{}, EvalMode::RefineOnly)).contains("tasks_succeeded"));
}

TEST(Eval, ReportIsByteStable) {
  const auto cases = load_corpus(kData / "corpus" / "checksum_96.jsonl");
  support::TempDir a, b;
  write_report(run_eval(cases, AppConfig{}, EvalMode::RefineOnly), a.path());
  write_report(run_eval(cases, AppConfig{}, EvalMode::RefineOnly), b.path());
  EXPECT_EQ(slurp(a.path() / "report.json"), slurp(b.path() / "report.json"));
  EXPECT_EQ(slurp(a.path() / "report.txt"), slurp(b.path() / "report.txt"));
  EXPECT_FALSE(slurp(a.path() / "report.txt").empty());
}

TEST(CorpusGen, DeterministicAndValid) {
  const auto code_dir = kData / "code";
  const auto one = gen_corpus(11, 30, code_dir);
  const auto two = gen_corpus(11, 30, code_dir);
  EXPECT_EQ(serialize_corpus(one), serialize_corpus(two));
  EXPECT_NE(serialize_corpus(one), serialize_corpus(gen_corpus(12, 30, code_dir)));
  ASSERT_EQ(one.size(), 30u);
  EXPECT_EQ(one[0].id, "gen-11-0001");
  std::size_t changed = 0;
  for (const auto& c : one) changed += c.corrupted_transcript != c.expected_refined;
  EXPECT_EQ(changed, one.size());
  EXPECT_NO_THROW(parse_corpus(serialize_corpus(one)));
  EXPECT_DOUBLE_EQ(run_eval(one, AppConfig{}, EvalMode::RefineOnly).exact_match_rate(), 1.0);
}

TEST(CorpusGen, RejectsBadInput) {
  EXPECT_THROW(gen_corpus(1, 0, kData / "code"), std::invalid_argument);
  support::TempDir empty;
  EXPECT_THROW(gen_corpus(1, 5, empty.path()), std::runtime_error);
}

TEST(EvalCli, ExitCodes) {
  support::TempDir out;
  const std::string corpus = (kData / "corpus" / "checksum_96.jsonl").string();
  EXPECT_EQ(run_cli("run --corpus " + corpus + " --mode refine --out " + out.path().string()), 0);
  const auto report = nlohmann::json::parse(slurp(out.path() / "report.json"));
  EXPECT_EQ(report["exact_match_rate_text"], "0.7500");
  EXPECT_EQ(report["n_cases"], 96);

  const auto bad = out.path() / "bad.jsonl";
  std::ofstream(bad) << "{\"id\": 1}\n";
  EXPECT_EQ(run_cli("run --corpus " + bad.string() + " --mode refine --out " + out.path().string()), 2);
  EXPECT_EQ(run_cli("run --corpus " + (out.path() / "missing.jsonl").string() + " --mode refine --out " +
                    out.path().string()),
            1);
  EXPECT_EQ(run_cli("gen --seed 1 --n 0 --code-dir " + (kData / "code").string() + " --out " +
                    (out.path() / "g.jsonl").string()),
            2);
  const auto gen_a = out.path() / "a.jsonl";
  const auto gen_b = out.path() / "b.jsonl";
  EXPECT_EQ(run_cli("gen --seed 3 --n 12 --code-dir " + (kData / "code").string() + " --out " + gen_a.string()), 0);
  EXPECT_EQ(run_cli("gen --seed 3 --n 12 --code-dir " + (kData / "code").string() + " --out " + gen_b.string()), 0);
  EXPECT_EQ(slurp(gen_a), slurp(gen_b));
}
