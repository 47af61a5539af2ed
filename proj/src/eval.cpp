#include "codevoice/eval.hpp"

#include "codevoice/orchestrator.hpp"
#include "codevoice/refinement.hpp"
#include "codevoice/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace codevoice::eval {

using nlohmann::json;
namespace fs = std::filesystem;

double wer(std::string_view reference, std::string_view hypothesis) {
  const auto ref = text::split_whitespace(reference);
  const auto hyp = text::split_whitespace(hypothesis);
  const auto distance = text::levenshtein(ref, hyp);
  return static_cast<double>(distance) / static_cast<double>(std::max<std::size_t>(1, ref.size()));
}

CorpusError::CorpusError(std::size_t line, const std::string& message)
    : std::runtime_error("corpus line " + std::to_string(line) + ": " + message), line_(line) {}

json to_json(const EvalCase& c) {
  return json{{"id", c.id},
              {"language", to_string(c.language)},
              {"corrupted_transcript", c.corrupted_transcript},
              {"code", c.code},
              {"code_lang", lexicon::to_string(c.code_lang)},
              {"expected_refined", c.expected_refined},
              {"expected_terms", c.expected_terms}};
}

namespace {

std::string string_field(const json& doc, const char* name, std::size_t line) {
  const auto it = doc.find(name);
  if (it == doc.end()) throw CorpusError(line, std::string("missing field '") + name + "'");
  if (!it->is_string()) throw CorpusError(line, std::string("field '") + name + "' must be a string");
  return it->get<std::string>();
}

double round4(double v) { return std::round(v * 10000.0) / 10000.0; }

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::size_t count_present(const std::vector<std::string>& terms, const std::string& text) {
  const auto words = text::split_whitespace(text);
  const std::set<std::string> present(words.begin(), words.end());
  return static_cast<std::size_t>(
      std::count_if(terms.begin(), terms.end(), [&](const std::string& t) { return present.count(t) > 0; }));
}

std::string_view mode_name(EvalMode mode) { return mode == EvalMode::RefineOnly ? "REFINE_ONLY" : "FULL_MOCK"; }

// Full-mock scoring: each case runs as a real task against mock providers.
std::vector<std::optional<pipeline::TaskSnapshot>> run_pipeline(const std::vector<EvalCase>& cases,
                                                                const AppConfig& config) {
  std::random_device rd;
  const fs::path dir = fs::temp_directory_path() / ("codevoice-eval-" + std::to_string(rd()) + std::to_string(rd()));
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{dir};

  AppConfig cfg = config;
  bind_all_mock(cfg);
  pipeline::OrchestratorConfig ocfg;
  ocfg.workers = cfg.workers;
  ocfg.queue_capacity = std::max<std::size_t>(cfg.queue_capacity, cases.size());
  ocfg.retained_snapshots = std::max<std::size_t>(cfg.retained_snapshots, cases.size());
  ocfg.data_dir = dir;
  ocfg.refinement = cfg.refinement;
  auto gateway = std::make_shared<providers::ProviderGateway>(cfg.gateway);
  pipeline::Orchestrator orch(std::move(ocfg), gateway);
  orch.start();

  std::vector<std::string> ids;
  for (const auto& c : cases) {
    pipeline::SubmitRequest req;
    req.language = c.language;
    req.audio = c.corrupted_transcript;
    req.media_type = "text/plain";
    req.code = c.code;
    req.code_lang = c.code_lang;
    ids.push_back(orch.submit(std::move(req)));
  }
  std::vector<std::optional<pipeline::TaskSnapshot>> out;
  for (const auto& id : ids) out.push_back(orch.wait(id, std::chrono::seconds(60)));
  orch.stop();
  return out;
}

}  // namespace

EvalCase case_from_json(const json& doc, std::size_t line) {
  if (!doc.is_object()) throw CorpusError(line, "expected a JSON object");
  EvalCase c;
  c.id = string_field(doc, "id", line);
  if (c.id.empty()) throw CorpusError(line, "empty id");
  const auto lang = string_field(doc, "language", line);
  const auto parsed_lang = parse_language(lang);
  if (!parsed_lang) throw CorpusError(line, "unknown language '" + lang + "'");
  c.language = *parsed_lang;
  c.corrupted_transcript = string_field(doc, "corrupted_transcript", line);
  c.code = string_field(doc, "code", line);
  const auto code_lang = string_field(doc, "code_lang", line);
  const auto parsed_code_lang = lexicon::parse_source_language(code_lang);
  if (!parsed_code_lang) throw CorpusError(line, "unknown code_lang '" + code_lang + "'");
  c.code_lang = *parsed_code_lang;
  c.expected_refined = string_field(doc, "expected_refined", line);
  const auto terms = doc.find("expected_terms");
  if (terms == doc.end() || !terms->is_array()) throw CorpusError(line, "expected_terms must be an array");
  for (const auto& t : *terms) {
    if (!t.is_string()) throw CorpusError(line, "expected_terms entries must be strings");
    c.expected_terms.push_back(t.get<std::string>());
  }
  if (count_present(c.expected_terms, c.expected_refined) != c.expected_terms.size()) {
    throw CorpusError(line, "expected_terms must be tokens of expected_refined");
  }
  for (const auto* s : {&c.corrupted_transcript, &c.code, &c.expected_refined}) {
    if (!text::is_valid_utf8(*s)) throw CorpusError(line, "invalid UTF-8");
  }
  return c;
}

std::vector<EvalCase> parse_corpus(std::string_view text) {
  std::vector<EvalCase> cases;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (text::normalize_spaces(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError(line_no, std::string("invalid JSON: ") + e.what());
    }
    auto c = case_from_json(doc, line_no);
    if (!seen.insert(c.id).second) throw CorpusError(line_no, "duplicate id '" + c.id + "'");
    cases.push_back(std::move(c));
  }
  if (cases.empty()) throw CorpusError(line_no, "corpus has no cases");
  return cases;
}

std::vector<EvalCase> load_corpus(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::string serialize_corpus(const std::vector<EvalCase>& cases) {
  std::string out;
  for (const auto& c : cases) {
    out += to_json(c).dump();
    out += '\n';
  }
  return out;
}

double EvalReport::exact_match_rate() const { return ratio(exact_count, n_cases); }

double EvalReport::term_recovery_rate() const {
  return terms_total == 0 ? 1.0 : ratio(terms_found, terms_total);
}

EvalReport run_eval(const std::vector<EvalCase>& cases, const AppConfig& config, EvalMode mode) {
  EvalReport report;
  report.mode = mode;
  report.n_cases = cases.size();

  std::vector<std::optional<pipeline::TaskSnapshot>> tasks;
  if (mode == EvalMode::FullMock) tasks = run_pipeline(cases, config);

  double before_sum = 0.0;
  double after_sum = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    CaseRow row;
    row.id = c.id;
    if (mode == EvalMode::RefineOnly) {
      const refine::RawTranscript raw{c.corrupted_transcript, c.language, "eval"};
      const auto refined = refine::refine(raw, c.code, c.code_lang, config.refinement);
      row.refined = refined.text;
      row.edits = refined.edits.size();
    } else {
      const auto& snap = tasks[i];
      row.task_state = snap ? std::string(pipeline::to_string(snap->state)) : std::string("TIMED_OUT");
      if (snap && snap->state == pipeline::TaskState::Succeeded) ++report.tasks_succeeded;
      if (snap && snap->refined_transcript) row.refined = *snap->refined_transcript;
      if (snap && snap->edits) row.edits = snap->edits->size();
    }
    row.exact = text::normalize_spaces(row.refined) == text::normalize_spaces(c.expected_refined);
    if (mode == EvalMode::FullMock && row.task_state != "SUCCEEDED") row.exact = false;
    row.terms_total = c.expected_terms.size();
    row.terms_found = count_present(c.expected_terms, row.refined);
    row.wer_before = wer(c.expected_refined, c.corrupted_transcript);
    row.wer_after = wer(c.expected_refined, row.refined);

    report.exact_count += row.exact ? 1 : 0;
    report.terms_found += row.terms_found;
    report.terms_total += row.terms_total;
    before_sum += row.wer_before;
    after_sum += row.wer_after;
    report.rows.push_back(std::move(row));
  }
  if (!cases.empty()) {
    report.mean_wer_before = before_sum / static_cast<double>(cases.size());
    report.mean_wer_after = after_sum / static_cast<double>(cases.size());
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const CaseRow& a, const CaseRow& b) { return a.id < b.id; });
  return report;
}

json report_to_json(const EvalReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"id", row.id},
           {"refined", row.refined},
           {"exact", row.exact},
           {"terms_found", row.terms_found},
           {"terms_total", row.terms_total},
           {"wer_before", round4(row.wer_before)},
           {"wer_after", round4(row.wer_after)},
           {"edits", row.edits}};
    if (row.task_state) j["task_state"] = *row.task_state;
    rows.push_back(std::move(j));
  }
  json out{{"mode", mode_name(r.mode)},
           {"n_cases", r.n_cases},
           {"exact_count", r.exact_count},
           {"exact_match_rate", round4(r.exact_match_rate())},
           {"exact_match_rate_text", fixed4(r.exact_match_rate())},
           {"terms_found", r.terms_found},
           {"terms_total", r.terms_total},
           {"term_recovery_rate", round4(r.term_recovery_rate())},
           {"mean_wer_before", round4(r.mean_wer_before)},
           {"mean_wer_after", round4(r.mean_wer_after)},
           {"rows", rows}};
  if (r.mode == EvalMode::FullMock) out["tasks_succeeded"] = r.tasks_succeeded;
  return out;
}

std::string report_to_table(const EvalReport& r) {
  std::ostringstream os;
  os << "mode                " << mode_name(r.mode) << '\n'
     << "cases               " << r.n_cases << '\n'
     << "exact matches       " << r.exact_count << '/' << r.n_cases << '\n'
     << "exact_match_rate    " << fixed4(r.exact_match_rate()) << '\n'
     << "term_recovery_rate  " << fixed4(r.term_recovery_rate()) << " (" << r.terms_found << '/' << r.terms_total
     << ")\n"
     << "mean_wer_before     " << fixed4(r.mean_wer_before) << '\n'
     << "mean_wer_after      " << fixed4(r.mean_wer_after) << '\n';
  if (r.mode == EvalMode::FullMock) os << "tasks_succeeded     " << r.tasks_succeeded << '/' << r.n_cases << '\n';
  os << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-5s %-7s %-8s %-8s %s\n", "id", "exact", "terms", "wer_pre", "wer_post",
                "refined");
  os << line;
  for (const auto& row : r.rows) {
    const std::string terms = std::to_string(row.terms_found) + "/" + std::to_string(row.terms_total);
    std::snprintf(line, sizeof line, "%-24s %-5s %-7s %-8s %-8s ", row.id.c_str(), row.exact ? "yes" : "no",
                  terms.c_str(), fixed4(row.wer_before).c_str(), fixed4(row.wer_after).c_str());
    os << line << row.refined << '\n';
  }
  return os.str();
}

void write_report(const EvalReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  const auto write = [](const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
  };
  write(dir / "report.json", report_to_json(report).dump(2) + "\n");
  write(dir / "report.txt", report_to_table(report));
}

}  // namespace codevoice::eval
