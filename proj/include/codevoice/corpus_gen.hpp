#pragma once

#include "codevoice/eval.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace codevoice::eval {

/// Builds n synthetic cases from the *.c and *.py files in code_dir
/// (visited in name order). Each case applies one corruption to a clean
/// templated question about a term of the snippet:
///   - a vowel mutation of an identifier that keeps its phonetic key,
///   - a snake_case identifier spoken with "underscore",
///   - "ASCII" spoken as "ask key".
/// The clean question is the ground truth. Candidates that the default
/// refinement tables would not map back to their ground truth (for example
/// because a template word sounds like a code term) are redrawn.
/// Output is a pure function of (seed, n, directory contents).
/// Throws std::invalid_argument for n == 0, std::runtime_error when the
/// directory holds no usable snippet.
std::vector<EvalCase> gen_corpus(std::uint64_t seed, std::size_t n, const std::filesystem::path& code_dir);

}  // namespace codevoice::eval
