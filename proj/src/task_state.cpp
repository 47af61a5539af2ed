#include "codevoice/task_state.hpp"

namespace codevoice::pipeline {

std::string_view to_string(TaskState state) {
  switch (state) {
    case TaskState::Queued:
      return "QUEUED";
    case TaskState::Transcribing:
      return "TRANSCRIBING";
    case TaskState::Refining:
      return "REFINING";
    case TaskState::Generating:
      return "GENERATING";
    case TaskState::Synthesizing:
      return "SYNTHESIZING";
    case TaskState::Succeeded:
      return "SUCCEEDED";
    case TaskState::Failed:
      break;
  }
  return "FAILED";
}

std::optional<TaskState> parse_task_state(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(TaskState::Failed); ++i) {
    const auto s = static_cast<TaskState>(i);
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

}  // namespace codevoice::pipeline
