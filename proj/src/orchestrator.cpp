#include "codevoice/orchestrator.hpp"

#include "codevoice/text_util.hpp"

#include <iostream>

namespace codevoice::pipeline {

using providers::ProviderError;
using providers::ProviderKind;

namespace {

// One retry for transient provider faults.
template <class Fn>
auto with_retry(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ProviderError& e) {
    if (!e.transient()) throw;
  }
  return fn();
}

TaskError provider_error(const ProviderError& e) {
  return TaskError{std::string(providers::stage_name(e.stage())), std::string(providers::to_string(e.stage())),
                   std::string(providers::to_string(e.code())), e.what()};
}

TaskError internal_error(std::string stage, const std::exception& e) {
  return TaskError{std::move(stage), "", "INTERNAL", e.what()};
}

}  // namespace

Orchestrator::Orchestrator(OrchestratorConfig config, std::shared_ptr<providers::ProviderGateway> gateway)
    : config_(std::move(config)),
      gateway_(std::move(gateway)),
      blobs_(config_.data_dir / "blobs"),
      log_(config_.data_dir / "requests.log") {
  if (!gateway_) throw std::invalid_argument("orchestrator needs a provider gateway");
  if (config_.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (config_.queue_capacity < 1) throw std::invalid_argument("queue capacity must be >= 1");
}

Orchestrator::~Orchestrator() { stop(); }

void Orchestrator::start() {
  std::lock_guard lock(mu_);
  if (!workers_.empty()) return;
  stopping_ = false;
  for (int i = 0; i < config_.workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

void Orchestrator::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

std::string Orchestrator::submit(SubmitRequest request) {
  const std::string audio_ref = blobs_.put(request.audio, request.media_type);

  Task task;
  task.snap.task_id = text::make_uuid_v4();
  task.snap.created_at = Clock::now();
  task.snap.language = request.language;
  task.snap.state = TaskState::Queued;
  task.snap.audio_ref = audio_ref;
  task.snap.code = std::move(request.code);
  task.snap.problem = std::move(request.problem);
  task.snap.transitions.push_back({TaskState::Queued, task.snap.created_at});
  task.media_type = std::move(request.media_type);
  task.code_lang = request.code_lang.value_or(lexicon::detect_source_language(task.snap.code));

  std::string id = task.snap.task_id;
  {
    std::lock_guard lock(mu_);
    if (queue_.size() >= config_.queue_capacity) {
      throw QueueFull("queue holds " + std::to_string(queue_.size()) + " pending tasks");
    }
    tasks_.emplace(id, std::move(task));
    queue_.push_back(id);
  }
  queue_cv_.notify_one();
  return id;
}

TaskSnapshot Orchestrator::poll(const std::string& task_id) {
  {
    std::lock_guard lock(mu_);
    const auto it = tasks_.find(task_id);
    if (it != tasks_.end()) {
      if (const auto pos = lru_pos_.find(task_id); pos != lru_pos_.end()) {
        lru_.splice(lru_.begin(), lru_, pos->second);
      }
      return it->second.snap;
    }
  }
  const auto entry = log_.find(task_id);
  if (!entry) throw TaskNotFound("unknown task " + task_id);
  TaskSnapshot snap;
  snap.task_id = entry->task_id;
  snap.created_at = text::parse_utc(entry->created_at).value_or(Clock::time_point{});
  snap.language = entry->language;
  snap.state = entry->state;
  snap.raw_transcript = entry->raw_transcript;
  snap.refined_transcript = entry->refined_transcript;
  snap.response_text = entry->response_text;
  if (entry->state == TaskState::Failed) snap.error = TaskError{"", "", "FAILED", "details evicted from memory"};
  return snap;
}

std::vector<RequestLogEntry> Orchestrator::history(std::size_t limit) const { return log_.recent(limit); }

std::optional<StoredBlob> Orchestrator::response_audio(const std::string& task_id) {
  std::optional<std::string> ref;
  {
    std::lock_guard lock(mu_);
    const auto it = tasks_.find(task_id);
    if (it == tasks_.end()) return std::nullopt;
    if (it->second.snap.state != TaskState::Succeeded) return std::nullopt;
    ref = it->second.snap.response_audio_ref;
  }
  if (!ref) return std::nullopt;
  return blobs_.get(*ref);
}

std::optional<TaskSnapshot> Orchestrator::wait(const std::string& task_id, std::chrono::milliseconds timeout) {
  {
    std::unique_lock lock(mu_);
    const bool done = done_cv_.wait_for(lock, timeout, [&] {
      const auto it = tasks_.find(task_id);
      return it == tasks_.end() || is_terminal(it->second.snap.state);
    });
    if (!done) return std::nullopt;
  }
  try {
    return poll(task_id);
  } catch (const TaskNotFound&) {
    return std::nullopt;
  }
}

std::size_t Orchestrator::pending() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void Orchestrator::worker_loop() {
  for (;;) {
    std::string id;
    {
      std::unique_lock lock(mu_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = std::move(queue_.front());
      queue_.pop_front();
    }
    run_task(id);
  }
}

Orchestrator::Task Orchestrator::copy_task(const std::string& task_id) const {
  std::lock_guard lock(mu_);
  return tasks_.at(task_id);
}

void Orchestrator::begin_stage(const std::string& task_id, TaskState stage) {
  std::lock_guard lock(mu_);
  auto& snap = tasks_.at(task_id).snap;
  const auto now = Clock::now();
  snap.state = stage;
  snap.transitions.push_back({stage, now});
  snap.stage_timestamps[stage] = StageSpan{now, std::nullopt};
}

template <class Fn>
void Orchestrator::end_stage(const std::string& task_id, TaskState stage, Fn&& record_output) {
  std::lock_guard lock(mu_);
  auto& task = tasks_.at(task_id);
  record_output(task);
  task.snap.stage_timestamps[stage].end = Clock::now();
}

void Orchestrator::fail(const std::string& task_id, TaskState stage, TaskError error) {
  {
    std::lock_guard lock(mu_);
    auto& task = tasks_.at(task_id);
    const auto now = Clock::now();
    task.snap.stage_timestamps[stage].end = now;
    task.snap.error = std::move(error);
    task.snap.state = TaskState::Failed;
    task.snap.transitions.push_back({TaskState::Failed, now});
    finalize_locked(task);
  }
  done_cv_.notify_all();
}

void Orchestrator::finish(const std::string& task_id) {
  {
    std::lock_guard lock(mu_);
    auto& task = tasks_.at(task_id);
    task.snap.state = TaskState::Succeeded;
    task.snap.transitions.push_back({TaskState::Succeeded, Clock::now()});
    finalize_locked(task);
  }
  done_cv_.notify_all();
}

void Orchestrator::finalize_locked(Task& task) {
  const auto& s = task.snap;
  RequestLogEntry entry;
  entry.task_id = s.task_id;
  entry.created_at = text::format_utc(s.created_at);
  entry.language = s.language;
  entry.state = s.state;
  for (const auto& [stage, span] : s.stage_timestamps) {
    if (!span.end) continue;
    entry.durations_ms[std::string(to_string(stage))] =
        std::chrono::duration_cast<std::chrono::milliseconds>(*span.end - span.start).count();
  }
  entry.raw_transcript = s.raw_transcript;
  entry.refined_transcript = s.refined_transcript;
  entry.response_text = s.response_text;
  try {
    log_.append(entry);
  } catch (const std::exception& e) {
    std::cerr << "request log: " << e.what() << '\n';
  }

  lru_.push_front(s.task_id);
  lru_pos_[s.task_id] = lru_.begin();
  evict_locked();
}

void Orchestrator::evict_locked() {
  while (tasks_.size() > config_.retained_snapshots && !lru_.empty()) {
    const std::string victim = lru_.back();
    lru_.pop_back();
    lru_pos_.erase(victim);
    tasks_.erase(victim);
  }
}

void Orchestrator::run_task(const std::string& task_id) {
  const Task task = copy_task(task_id);
  const TaskSnapshot& s = task.snap;

  begin_stage(task_id, TaskState::Transcribing);
  refine::RawTranscript raw;
  try {
    const auto audio = blobs_.get(s.audio_ref);
    if (!audio) throw std::runtime_error("stored audio " + s.audio_ref + " is missing");
    raw = with_retry([&] { return gateway_->transcribe(audio->bytes, task.media_type, s.language); });
  } catch (const ProviderError& e) {
    fail(task_id, TaskState::Transcribing, provider_error(e));
    return;
  } catch (const std::exception& e) {
    fail(task_id, TaskState::Transcribing, internal_error("ASR", e));
    return;
  }
  end_stage(task_id, TaskState::Transcribing, [&](Task& t) { t.snap.raw_transcript = raw.text; });

  begin_stage(task_id, TaskState::Refining);
  refine::RefinedTranscript refined;
  try {
    refine::LlmRefiner llm;
    if (config_.refinement.llm_pass_enabled && gateway_->is_bound(ProviderKind::RefinerLlm)) {
      llm = [this](std::string_view text, std::string_view code, LanguageTag lang) {
        return with_retry([&] { return gateway_->refine_llm(text, code, lang); });
      };
    }
    const auto vocab = lexicon::extract_vocabulary(s.code, task.code_lang);
    refined = refine::refine(raw, vocab, config_.refinement, llm ? &llm : nullptr, s.code);
  } catch (const std::exception& e) {
    fail(task_id, TaskState::Refining, internal_error("REFINE", e));
    return;
  }
  end_stage(task_id, TaskState::Refining, [&](Task& t) {
    t.snap.refined_transcript = refined.text;
    t.snap.edits = refined.edits;
    t.snap.refinement_note = refined.degradation;
  });

  begin_stage(task_id, TaskState::Generating);
  std::string answer;
  try {
    answer = with_retry([&] { return gateway_->generate_response(refined.text, s.code, s.problem, s.language); });
  } catch (const ProviderError& e) {
    fail(task_id, TaskState::Generating, provider_error(e));
    return;
  } catch (const std::exception& e) {
    fail(task_id, TaskState::Generating, internal_error("CODEGEN", e));
    return;
  }
  end_stage(task_id, TaskState::Generating, [&](Task& t) { t.snap.response_text = answer; });

  if (gateway_->is_bound(ProviderKind::Tts)) {
    begin_stage(task_id, TaskState::Synthesizing);
    std::string audio_ref;
    try {
      const auto audio = with_retry([&] { return gateway_->synthesize_speech(answer, s.language); });
      if (audio) audio_ref = blobs_.put(audio->bytes, audio->media_type);
    } catch (const ProviderError& e) {
      fail(task_id, TaskState::Synthesizing, provider_error(e));
      return;
    } catch (const std::exception& e) {
      fail(task_id, TaskState::Synthesizing, internal_error("TTS", e));
      return;
    }
    end_stage(task_id, TaskState::Synthesizing, [&](Task& t) {
      if (!audio_ref.empty()) t.snap.response_audio_ref = audio_ref;
    });
  }
  finish(task_id);
}

}  // namespace codevoice::pipeline
