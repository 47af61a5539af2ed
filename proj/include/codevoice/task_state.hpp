#pragma once

#include <optional>
#include <string_view>

namespace codevoice::pipeline {

/// QUEUED -> TRANSCRIBING -> REFINING -> GENERATING [-> SYNTHESIZING] -> SUCCEEDED,
/// FAILED from any non-terminal state. SUCCEEDED and FAILED are absorbing.
enum class TaskState { Queued, Transcribing, Refining, Generating, Synthesizing, Succeeded, Failed };

std::string_view to_string(TaskState state);
std::optional<TaskState> parse_task_state(std::string_view text);

constexpr bool is_terminal(TaskState s) { return s == TaskState::Succeeded || s == TaskState::Failed; }

constexpr bool is_legal_transition(TaskState from, TaskState to) {
  if (is_terminal(from)) return false;
  if (to == TaskState::Failed) return true;
  switch (from) {
    case TaskState::Queued:
      return to == TaskState::Transcribing;
    case TaskState::Transcribing:
      return to == TaskState::Refining;
    case TaskState::Refining:
      return to == TaskState::Generating;
    case TaskState::Generating:
      return to == TaskState::Synthesizing || to == TaskState::Succeeded;
    case TaskState::Synthesizing:
      return to == TaskState::Succeeded;
    default:
      return false;
  }
}

}  // namespace codevoice::pipeline
