#pragma once

#include "codevoice/orchestrator.hpp"

#include <json.hpp>

#include <cstddef>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace codevoice::http {

inline constexpr std::size_t kMaxAudioBytes = 10u << 20;
inline constexpr std::size_t kMaxCodeBytes = 64u << 10;
inline constexpr std::size_t kMaxProblemBytes = 16u << 10;

struct HttpOptions {
  /// Only this Origin receives CORS headers.
  std::string cors_origin = "http://localhost:5173";
  std::size_t default_history_limit = 20;
};

nlohmann::json snapshot_to_json(const pipeline::TaskSnapshot& snap);
nlohmann::json log_entry_to_json(const pipeline::RequestLogEntry& entry);
nlohmann::json error_body(std::string_view code, std::string_view message);

/// REST face of the orchestrator:
///   POST /api/v1/queries                 multipart submit -> 202 {"task_id"}
///   GET  /api/v1/queries/{id}            snapshot
///   GET  /api/v1/queries/{id}/audio      synthesized answer
///   GET  /api/v1/queries?limit=N         request history
///   GET  /healthz                        binding report
class HttpService {
 public:
  HttpService(std::shared_ptr<pipeline::Orchestrator> orchestrator, HttpOptions options = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to an ephemeral port and returns it, or -1.
  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Serves until stop(); blocks.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  std::shared_ptr<pipeline::Orchestrator> orchestrator_;
  HttpOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace codevoice::http
