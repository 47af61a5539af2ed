#include "codevoice/config.hpp"
#include "codevoice/corpus_gen.hpp"
#include "codevoice/eval.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitIo = 1;
constexpr int kExitCorpus = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace codevoice;

  CLI::App app{"codevoice offline evaluation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "score a corpus");
  std::string corpus;
  std::string mode = "refine";
  std::string out_dir;
  std::string config_path;
  run->add_option("--corpus", corpus, "JSONL corpus")->required();
  run->add_option("--mode", mode, "refine | full")->check(CLI::IsMember({"refine", "full"}));
  run->add_option("--out", out_dir, "directory for report.json and report.txt")->required();
  run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string code_dir;
  std::string out_file;
  gen->add_option("--seed", seed)->required();
  gen->add_option("--n", n)->required();
  gen->add_option("--code-dir", code_dir)->required()->check(CLI::ExistingDirectory);
  gen->add_option("--out", out_file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      AppConfig cfg;
      if (!config_path.empty()) cfg = load_config_file(config_path);
      const auto cases = eval::load_corpus(corpus);
      const auto report = eval::run_eval(cases, cfg, mode == "full" ? eval::EvalMode::FullMock : eval::EvalMode::RefineOnly);
      eval::write_report(report, out_dir);
      std::cout << eval::report_to_table(report);
      return 0;
    }
    if (n == 0) {
      std::cerr << "--n must be >= 1\n";
      return kExitCorpus;
    }
    const auto cases = eval::gen_corpus(seed, n, code_dir);
    std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "cannot write " << out_file << '\n';
      return kExitIo;
    }
    out << eval::serialize_corpus(cases);
    if (!out.flush()) {
      std::cerr << "write failed: " << out_file << '\n';
      return kExitIo;
    }
    std::cout << "wrote " << cases.size() << " cases to " << out_file << '\n';
    return 0;
  } catch (const eval::CorpusError& e) {
    std::cerr << "CORPUS_PARSE: " << e.what() << '\n';
    return kExitCorpus;
  } catch (const std::exception& e) {
    std::cerr << "IO: " << e.what() << '\n';
    return kExitIo;
  }
}
