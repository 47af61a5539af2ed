#include "codevoice/http_service.hpp"

#include "codevoice/text_util.hpp"

#include <httplib.h>

namespace codevoice::http {

using nlohmann::json;
using pipeline::TaskState;

namespace {

json nullable(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  res.status = status;
  res.set_content(error_body(code, message).dump(), "application/json");
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string base_media_type(std::string_view content_type) {
  const auto semi = content_type.find(';');
  return text::to_lower_ascii(text::normalize_spaces(content_type.substr(0, semi)));
}

bool is_audio_type(std::string_view media_type) {
  return media_type == "audio/wav" || media_type == "audio/ogg" || media_type == "audio/webm";
}

// Field from either a multipart part or a url-encoded parameter.
std::optional<std::string> form_value(const httplib::Request& req, const std::string& name) {
  if (req.has_file(name)) return req.get_file_value(name).content;
  if (req.has_param(name)) return req.get_param_value(name);
  return std::nullopt;
}

}  // namespace

json error_body(std::string_view code, std::string_view message) {
  return json{{"error", {{"code", code}, {"message", message}}}};
}

json snapshot_to_json(const pipeline::TaskSnapshot& s) {
  json edits = nullptr;
  if (s.edits) {
    edits = json::array();
    for (const auto& e : *s.edits) {
      edits.push_back({{"span", {e.start, e.end}},
                       {"original", e.original},
                       {"replacement", e.replacement},
                       {"rule", refine::to_string(e.rule)}});
    }
  }
  json error = nullptr;
  if (s.error) {
    error = {{"stage", s.error->stage}, {"provider", s.error->provider}, {"code", s.error->code},
             {"message", s.error->message}};
  }
  json stages = json::object();
  for (const auto& [stage, span] : s.stage_timestamps) {
    stages[std::string(pipeline::to_string(stage))] = {
        {"start", text::format_utc(span.start)},
        {"end", span.end ? json(text::format_utc(*span.end)) : json(nullptr)}};
  }
  return json{{"task_id", s.task_id},
              {"state", pipeline::to_string(s.state)},
              {"raw_transcript", nullable(s.raw_transcript)},
              {"refined_transcript", nullable(s.refined_transcript)},
              {"edits", edits},
              {"response_text", nullable(s.response_text)},
              {"audio_available", s.state == TaskState::Succeeded && s.response_audio_ref.has_value()},
              {"error", error},
              {"created_at", text::format_utc(s.created_at)},
              {"stage_timestamps", stages}};
}

json log_entry_to_json(const pipeline::RequestLogEntry& entry) { return pipeline::to_json(entry); }

HttpService::HttpService(std::shared_ptr<pipeline::Orchestrator> orchestrator, HttpOptions options)
    : orchestrator_(std::move(orchestrator)), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  // Room for the audio limit plus form overhead; larger bodies are refused by
  // the transport before reaching the handlers.
  server_->set_payload_max_length(4 * kMaxAudioBytes);
  install_routes();
}

HttpService::~HttpService() { stop(); }

int HttpService::bind_to_any_port(const std::string& host) { return server_->bind_to_any_port(host); }
bool HttpService::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }
bool HttpService::listen_after_bind() { return server_->listen_after_bind(); }
void HttpService::stop() {
  if (server_) server_->stop();
}
void HttpService::wait_until_ready() const { server_->wait_until_ready(); }

void HttpService::install_routes() {
  auto& srv = *server_;

  srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    if (!origin.empty() && origin == options_.cors_origin) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
      if (req.method == "OPTIONS") {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Max-Age", "600");
        res.status = 204;
        return httplib::Server::HandlerResponse::Handled;
      }
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    switch (res.status) {
      case 404:
        send_error(res, 404, "NOT_FOUND", "no such resource");
        break;
      case 413:
        send_error(res, 413, "TOO_LARGE", "request body too large");
        break;
      default:
        send_error(res, res.status, "HTTP_" + std::to_string(res.status), httplib::status_message(res.status));
    }
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, "INTERNAL", message);
  });

  srv.Post("/api/v1/queries", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
      send_error(res, 400, "MISSING_FIELD", "expected multipart/form-data with audio, language and code");
      return;
    }
    if (!req.has_file("audio") || req.get_file_value("audio").content.empty()) {
      send_error(res, 400, "MISSING_FIELD", "audio part is missing or empty");
      return;
    }
    const auto& audio = req.get_file_value("audio");
    const auto language_text = form_value(req, "language");
    const auto code = form_value(req, "code");
    const auto problem = form_value(req, "problem").value_or("");
    if (!language_text) {
      send_error(res, 400, "MISSING_FIELD", "language is required");
      return;
    }
    if (!code) {
      send_error(res, 400, "MISSING_FIELD", "code is required");
      return;
    }
    const auto language = parse_language(*language_text);
    if (!language) {
      send_error(res, 400, "INVALID_LANGUAGE", "unsupported language '" + *language_text + "'");
      return;
    }
    if (audio.content.size() > kMaxAudioBytes) {
      send_error(res, 400, "TOO_LARGE", "audio exceeds 10 MiB");
      return;
    }
    if (code->size() > kMaxCodeBytes) {
      send_error(res, 400, "TOO_LARGE", "code exceeds 64 KiB");
      return;
    }
    if (problem.size() > kMaxProblemBytes) {
      send_error(res, 400, "TOO_LARGE", "problem exceeds 16 KiB");
      return;
    }
    if (!text::is_valid_utf8(*code) || !text::is_valid_utf8(problem)) {
      send_error(res, 400, "INVALID_ENCODING", "code and problem must be UTF-8");
      return;
    }
    std::string media_type = base_media_type(audio.content_type);
    if (media_type.empty()) media_type = "application/octet-stream";
    const auto* asr = orchestrator_->gateway().binding(providers::route_asr(*language));
    const bool text_ok = media_type == "text/plain" && asr && asr->is_mock();
    if (!is_audio_type(media_type) && !text_ok) {
      send_error(res, 415, "UNSUPPORTED_MEDIA_TYPE", "audio must be audio/wav, audio/ogg or audio/webm");
      return;
    }
    std::optional<lexicon::SourceLanguage> code_lang;
    if (const auto v = form_value(req, "code_lang"); v && !v->empty()) {
      code_lang = lexicon::parse_source_language(*v);
      if (!code_lang) {
        send_error(res, 400, "INVALID_CODE_LANG", "code_lang must be C, PYTHON or UNKNOWN");
        return;
      }
    }

    pipeline::SubmitRequest submit;
    submit.language = *language;
    submit.audio = audio.content;
    submit.media_type = media_type;
    submit.code = *code;
    submit.problem = problem;
    submit.code_lang = code_lang;
    try {
      const std::string id = orchestrator_->submit(std::move(submit));
      send_json(res, 202, json{{"task_id", id}});
    } catch (const pipeline::QueueFull& e) {
      send_error(res, 503, "QUEUE_FULL", e.what());
    }
  });

  srv.Get("/api/v1/queries", [this](const httplib::Request& req, httplib::Response& res) {
    std::size_t limit = options_.default_history_limit;
    if (req.has_param("limit")) {
      const std::string raw = req.get_param_value("limit");
      long value = 0;
      std::size_t used = 0;
      try {
        value = std::stol(raw, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != raw.size() || value <= 0) {
        send_error(res, 400, "INVALID_LIMIT", "limit must be a positive integer");
        return;
      }
      limit = static_cast<std::size_t>(value);
    }
    json out = json::array();
    for (const auto& entry : orchestrator_->history(limit)) out.push_back(log_entry_to_json(entry));
    send_json(res, 200, out);
  });

  srv.Get(R"(/api/v1/queries/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, 200, snapshot_to_json(orchestrator_->poll(req.matches[1])));
    } catch (const pipeline::TaskNotFound&) {
      send_error(res, 404, "NOT_FOUND", "unknown task id");
    }
  });

  srv.Get(R"(/api/v1/queries/([^/]+)/audio)", [this](const httplib::Request& req, httplib::Response& res) {
    const auto audio = orchestrator_->response_audio(req.matches[1]);
    if (!audio) {
      send_error(res, 404, "NOT_FOUND", "no synthesized audio for this task");
      return;
    }
    res.status = 200;
    res.set_content(audio->bytes, audio->media_type);
  });

  srv.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, json{{"status", "ok"}, {"bindings", orchestrator_->gateway().health_bindings()}});
  });
}

}  // namespace codevoice::http
