#pragma once

#include "codevoice/provider_gateway.hpp"
#include "codevoice/refinement.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace codevoice {

/// Everything the server and the eval CLI read from a config file.
///
/// File format (JSON, every key optional):
///
///   {
///     "listen": "127.0.0.1:8466",
///     "workers": 4,
///     "queue_capacity": 1000,
///     "retained_snapshots": 10000,
///     "log_dir": "codevoice-data",
///     "cors_origin": "http://localhost:5173",
///     "lanes": {"a": 1, "b": 1},
///     "providers": {
///       "ASR_EN":      {"endpoint": "http://gpu0:9000/asr", "timeout_ms": 60000, "lane": "a", "token": "..."},
///       "ASR_INDIC":   {...}, "CODEGEN": {...},
///       "REFINER_LLM": {"endpoint": "MOCK"},      // omit or "enabled": false to disable
///       "TTS":         {"enabled": false}
///     },
///     "refinement": {
///       "max_normalized_edit_distance": 0.34,
///       "protected_words": ["the", "a", ...],
///       "llm_pass_enabled": false,
///       "symbols_file": "symbols.tsv",
///       "confusions_file": "confusions.tsv"
///     }
///   }
///
/// Environment overrides (applied after the file):
///   CODEVOICE_LISTEN, CODEVOICE_WORKERS, CODEVOICE_QUEUE_CAPACITY,
///   CODEVOICE_LOG_DIR, CODEVOICE_CORS_ORIGIN, and per provider kind K
///   (ASR_EN, ASR_INDIC, REFINER_LLM, CODEGEN, TTS):
///   CODEVOICE_<K>_ENDPOINT, CODEVOICE_<K>_TIMEOUT_MS, CODEVOICE_<K>_LANE,
///   CODEVOICE_<K>_TOKEN.
struct AppConfig {
  std::string listen = "127.0.0.1:8466";
  int workers = 4;
  std::size_t queue_capacity = 1000;
  std::size_t retained_snapshots = 10'000;
  std::filesystem::path log_dir = "codevoice-data";
  std::string cors_origin = "http://localhost:5173";
  providers::GatewayConfig gateway{providers::GatewayConfig::default_lanes(), {}};
  refine::RefinementConfig refinement;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Parses a config document. Relative table paths resolve against base_dir.
/// Throws std::invalid_argument on unknown providers or bad values.
AppConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
AppConfig load_config_file(const std::filesystem::path& path);

void apply_env_overrides(AppConfig& cfg, const EnvLookup& env);

/// Binds every provider kind to MOCK (keeps lanes and timeouts).
void bind_all_mock(AppConfig& cfg);

/// "host:port" -> pair; throws std::invalid_argument.
std::pair<std::string, int> parse_listen(const std::string& listen);

}  // namespace codevoice
