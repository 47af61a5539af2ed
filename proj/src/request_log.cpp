#include "codevoice/request_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace codevoice::pipeline {

using nlohmann::json;

namespace {

json optional_text(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> read_optional(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<std::string>();
}

}  // namespace

json to_json(const RequestLogEntry& e) {
  json durations = json::object();
  for (const auto& [stage, ms] : e.durations_ms) durations[stage] = ms;
  return json{{"task_id", e.task_id},
              {"created_at", e.created_at},
              {"language", to_string(e.language)},
              {"state", to_string(e.state)},
              {"durations_ms", durations},
              {"raw_transcript", optional_text(e.raw_transcript)},
              {"refined_transcript", optional_text(e.refined_transcript)},
              {"response_text", optional_text(e.response_text)}};
}

RequestLogEntry entry_from_json(const json& doc) {
  try {
    RequestLogEntry e;
    e.task_id = doc.at("task_id").get<std::string>();
    e.created_at = doc.at("created_at").get<std::string>();
    const auto lang = parse_language(doc.at("language").get<std::string>());
    const auto state = parse_task_state(doc.at("state").get<std::string>());
    if (!lang || !state) throw std::invalid_argument("bad language or state");
    e.language = *lang;
    e.state = *state;
    for (const auto& [stage, ms] : doc.at("durations_ms").items()) e.durations_ms[stage] = ms.get<std::int64_t>();
    e.raw_transcript = read_optional(doc, "raw_transcript");
    e.refined_transcript = read_optional(doc, "refined_transcript");
    e.response_text = read_optional(doc, "response_text");
    return e;
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("malformed log entry: ") + ex.what());
  }
}

RequestLog::RequestLog(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());

  std::string content;
  {
    std::ifstream in(file_, std::ios::binary);
    if (in) {
      std::ostringstream buf;
      buf << in.rdbuf();
      content = buf.str();
    }
  }
  const auto last_lf = content.rfind('\n');
  const std::size_t complete = last_lf == std::string::npos ? 0 : last_lf + 1;
  if (complete < content.size()) {
    ++discarded_;
    std::filesystem::resize_file(file_, complete);
  }
  std::size_t pos = 0;
  while (pos < complete) {
    const auto nl = content.find('\n', pos);
    const std::string line = content.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const json doc = json::parse(line, nullptr, false);
    try {
      if (doc.is_discarded()) throw std::invalid_argument("not JSON");
      auto entry = entry_from_json(doc);
      by_id_[entry.task_id] = entries_.size();
      entries_.push_back(std::move(entry));
    } catch (const std::invalid_argument&) {
      ++discarded_;
    }
  }

  fd_ = ::open(file_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw std::runtime_error("cannot open request log " + file_.string() + ": " + std::strerror(errno));
}

RequestLog::~RequestLog() {
  if (fd_ >= 0) ::close(fd_);
}

void RequestLog::append(const RequestLogEntry& entry) {
  const std::string line = to_json(entry).dump() + "\n";
  std::lock_guard lock(mu_);
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("request log write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
  ::fdatasync(fd_);
  by_id_[entry.task_id] = entries_.size();
  entries_.push_back(entry);
}

std::vector<RequestLogEntry> RequestLog::recent(std::size_t limit) const {
  if (limit == 0) throw std::invalid_argument("history limit must be >= 1");
  std::lock_guard lock(mu_);
  std::vector<RequestLogEntry> out;
  for (auto it = entries_.rbegin(); it != entries_.rend() && out.size() < limit; ++it) out.push_back(*it);
  return out;
}

std::optional<RequestLogEntry> RequestLog::find(const std::string& task_id) const {
  std::lock_guard lock(mu_);
  const auto it = by_id_.find(task_id);
  if (it == by_id_.end()) return std::nullopt;
  return entries_[it->second];
}

std::size_t RequestLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace codevoice::pipeline
