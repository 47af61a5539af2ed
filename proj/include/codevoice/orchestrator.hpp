#pragma once

#include "codevoice/blob_store.hpp"
#include "codevoice/code_lexicon.hpp"
#include "codevoice/provider_gateway.hpp"
#include "codevoice/refinement.hpp"
#include "codevoice/request_log.hpp"
#include "codevoice/task_state.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace codevoice::pipeline {

using Clock = std::chrono::system_clock;

struct StageSpan {
  Clock::time_point start;
  std::optional<Clock::time_point> end;
};

struct TaskError {
  std::string stage;     // "ASR", "REFINE", "CODEGEN", "TTS", ...
  std::string provider;  // provider kind name, empty when not a provider fault
  std::string code;      // TIMEOUT, PROVIDER_ERROR, MOCK_UNDECODABLE, INTERNAL
  std::string message;
};

struct Transition {
  TaskState state;
  Clock::time_point at;
};

/// Immutable copy of a task's public fields.
struct TaskSnapshot {
  std::string task_id;
  Clock::time_point created_at;
  LanguageTag language = LanguageTag::English;
  TaskState state = TaskState::Queued;
  std::string audio_ref;
  std::string code;
  std::string problem;
  std::optional<std::string> raw_transcript;
  std::optional<std::string> refined_transcript;
  std::optional<std::vector<refine::Edit>> edits;
  std::optional<std::string> refinement_note;
  std::optional<std::string> response_text;
  std::optional<std::string> response_audio_ref;
  std::optional<TaskError> error;
  std::map<TaskState, StageSpan> stage_timestamps;
  std::vector<Transition> transitions;
};

struct SubmitRequest {
  LanguageTag language = LanguageTag::English;
  std::string audio;
  std::string media_type = "audio/wav";
  std::string code;
  std::string problem;
  /// Detected from the code when absent.
  std::optional<lexicon::SourceLanguage> code_lang;
};

class QueueFull : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TaskNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OrchestratorConfig {
  int workers = 4;
  std::size_t queue_capacity = 1000;
  std::size_t retained_snapshots = 10'000;
  std::filesystem::path data_dir = "codevoice-data";
  refine::RefinementConfig refinement;
};

/// Owns every query task: FIFO queue, worker pool, snapshots for polling,
/// and the persistent request log (<data_dir>/requests.log) plus audio
/// blobs (<data_dir>/blobs). Safe for concurrent callers.
class Orchestrator {
 public:
  Orchestrator(OrchestratorConfig config, std::shared_ptr<providers::ProviderGateway> gateway);
  ~Orchestrator();
  Orchestrator(const Orchestrator&) = delete;
  Orchestrator& operator=(const Orchestrator&) = delete;

  void start();
  /// Stops after in-flight tasks finish; queued tasks stay QUEUED.
  void stop();

  /// Stores the audio, enqueues the task and returns its id without
  /// waiting for any model work. Throws QueueFull.
  std::string submit(SubmitRequest request);

  /// Throws TaskNotFound. Tasks evicted from memory are served from the log
  /// (without edits or audio).
  TaskSnapshot poll(const std::string& task_id);

  /// Newest first. Throws std::invalid_argument for limit 0.
  std::vector<RequestLogEntry> history(std::size_t limit) const;

  std::optional<StoredBlob> response_audio(const std::string& task_id);

  /// Blocks until the task is terminal or the timeout expires.
  std::optional<TaskSnapshot> wait(const std::string& task_id, std::chrono::milliseconds timeout);

  std::size_t pending() const;
  const OrchestratorConfig& config() const { return config_; }
  providers::ProviderGateway& gateway() { return *gateway_; }

 private:
  struct Task {
    TaskSnapshot snap;
    std::string media_type;
    lexicon::SourceLanguage code_lang = lexicon::SourceLanguage::Unknown;
  };

  void worker_loop();
  void run_task(const std::string& task_id);
  Task copy_task(const std::string& task_id) const;
  void begin_stage(const std::string& task_id, TaskState stage);
  template <class Fn>
  void end_stage(const std::string& task_id, TaskState stage, Fn&& record_output);
  void fail(const std::string& task_id, TaskState stage, TaskError error);
  void finish(const std::string& task_id);
  void finalize_locked(Task& task);
  void evict_locked();

  OrchestratorConfig config_;
  std::shared_ptr<providers::ProviderGateway> gateway_;
  BlobStore blobs_;
  RequestLog log_;

  mutable std::mutex mu_;
  std::condition_variable queue_cv_;
  std::condition_variable done_cv_;
  std::deque<std::string> queue_;
  std::unordered_map<std::string, Task> tasks_;
  std::list<std::string> lru_;  // terminal tasks, most recently used first
  std::unordered_map<std::string, std::list<std::string>::iterator> lru_pos_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace codevoice::pipeline
