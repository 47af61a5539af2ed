#pragma once

#include "codevoice/language.hpp"
#include "codevoice/task_state.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace codevoice::pipeline {

/// Terminal record of one task; one per task, never rewritten.
struct RequestLogEntry {
  std::string task_id;
  std::string created_at;  // ISO-8601 UTC
  LanguageTag language = LanguageTag::English;
  TaskState state = TaskState::Succeeded;
  std::map<std::string, std::int64_t> durations_ms;  // stage name -> milliseconds
  std::optional<std::string> raw_transcript;
  std::optional<std::string> refined_transcript;
  std::optional<std::string> response_text;

  friend bool operator==(const RequestLogEntry&, const RequestLogEntry&) = default;
};

nlohmann::json to_json(const RequestLogEntry& entry);
/// Throws std::invalid_argument on missing or malformed fields.
RequestLogEntry entry_from_json(const nlohmann::json& doc);

/// Append-only newline-delimited JSON file with an in-memory index.
/// On open, an unterminated trailing record (torn write) is cut off and
/// unparsable lines are skipped, so readers only ever see whole records.
class RequestLog {
 public:
  explicit RequestLog(std::filesystem::path file);
  ~RequestLog();
  RequestLog(const RequestLog&) = delete;
  RequestLog& operator=(const RequestLog&) = delete;

  void append(const RequestLogEntry& entry);

  /// Newest first, at most `limit` entries. Throws std::invalid_argument for limit 0.
  std::vector<RequestLogEntry> recent(std::size_t limit) const;
  std::optional<RequestLogEntry> find(const std::string& task_id) const;
  std::size_t size() const;
  /// Records dropped while loading (torn tail or corrupt lines).
  std::size_t discarded_on_load() const { return discarded_; }
  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::vector<RequestLogEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t discarded_ = 0;
};

}  // namespace codevoice::pipeline
