#pragma once

#include "codevoice/code_lexicon.hpp"
#include "codevoice/config.hpp"
#include "codevoice/language.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace codevoice::eval {

/// Word error rate: word-level Levenshtein distance over
/// max(1, number of reference words).
double wer(std::string_view reference, std::string_view hypothesis);

struct EvalCase {
  std::string id;
  LanguageTag language = LanguageTag::English;
  std::string corrupted_transcript;
  std::string code;
  lexicon::SourceLanguage code_lang = lexicon::SourceLanguage::Unknown;
  std::string expected_refined;
  std::vector<std::string> expected_terms;
};

/// A malformed corpus line. line() is 1-based.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

nlohmann::json to_json(const EvalCase& c);
/// Throws CorpusError(line, ...) on a missing field or invalid value.
EvalCase case_from_json(const nlohmann::json& doc, std::size_t line);

/// Newline-delimited JSON; blank lines are skipped. Ids must be unique.
std::vector<EvalCase> parse_corpus(std::string_view text);
std::vector<EvalCase> load_corpus(const std::filesystem::path& path);
std::string serialize_corpus(const std::vector<EvalCase>& cases);

enum class EvalMode { RefineOnly, FullMock };

struct CaseRow {
  std::string id;
  std::string refined;
  bool exact = false;
  std::size_t terms_found = 0;
  std::size_t terms_total = 0;
  double wer_before = 0.0;
  double wer_after = 0.0;
  std::size_t edits = 0;
  /// Terminal task state in full mode.
  std::optional<std::string> task_state;
};

struct EvalReport {
  EvalMode mode = EvalMode::RefineOnly;
  std::size_t n_cases = 0;
  std::size_t exact_count = 0;
  std::size_t terms_found = 0;
  std::size_t terms_total = 0;
  std::size_t tasks_succeeded = 0;  // full mode only
  double mean_wer_before = 0.0;
  double mean_wer_after = 0.0;
  std::vector<CaseRow> rows;  // sorted by id

  double exact_match_rate() const;
  /// Micro-averaged; 1.0 when the corpus names no terms.
  double term_recovery_rate() const;
};

/// Runs every case through refine(); FullMock additionally drives each case
/// through an all-mock pipeline (transcript bytes as text/plain audio) and
/// scores the pipeline's refined transcript.
EvalReport run_eval(const std::vector<EvalCase>& cases, const AppConfig& config, EvalMode mode);

/// Rates rendered to 4 decimals alongside the exact counts.
nlohmann::json report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

/// Writes report.json and report.txt under dir (created if needed).
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace codevoice::eval
