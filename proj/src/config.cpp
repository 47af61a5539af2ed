#include "codevoice/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace codevoice {

using nlohmann::json;
using providers::ProviderBinding;
using providers::ProviderKind;

namespace {

providers::ProviderBinding& binding_for(AppConfig& cfg, ProviderKind kind) {
  auto [it, inserted] = cfg.gateway.bindings.try_emplace(kind);
  if (inserted) {
    it->second.kind = kind;
    it->second.lane = providers::GatewayConfig::default_lane(kind);
  }
  return it->second;
}

long parse_positive(const std::string& what, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": not an integer: '" + value + "'");
  }
  if (used != value.size() || v <= 0) throw std::invalid_argument(what + ": expected a positive integer");
  return v;
}

template <class Table>
void load_table_file(Table& table, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open phrase table " + path.string());
  load_phrases(table, in);
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

AppConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw std::invalid_argument("config root must be a JSON object");
  AppConfig cfg;
  cfg.listen = doc.value("listen", cfg.listen);
  cfg.workers = doc.value("workers", cfg.workers);
  cfg.queue_capacity = doc.value("queue_capacity", cfg.queue_capacity);
  cfg.retained_snapshots = doc.value("retained_snapshots", cfg.retained_snapshots);
  if (doc.contains("log_dir")) cfg.log_dir = doc["log_dir"].get<std::string>();
  cfg.cors_origin = doc.value("cors_origin", cfg.cors_origin);
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");

  if (doc.contains("lanes")) {
    cfg.gateway.lanes.clear();
    for (const auto& [id, width] : doc["lanes"].items()) cfg.gateway.lanes.push_back({id, width.get<int>()});
  }
  if (doc.contains("providers")) {
    for (const auto& [name, entry] : doc["providers"].items()) {
      const auto kind = providers::parse_provider_kind(name);
      if (!kind) throw std::invalid_argument("unknown provider kind '" + name + "'");
      if (!entry.value("enabled", true)) {
        cfg.gateway.bindings.erase(*kind);
        continue;
      }
      auto& b = binding_for(cfg, *kind);
      b.endpoint = entry.value("endpoint", b.endpoint);
      if (entry.contains("timeout_ms")) b.timeout = std::chrono::milliseconds(entry["timeout_ms"].get<long>());
      b.lane = entry.value("lane", b.lane);
      if (entry.contains("token")) b.auth_token = entry["token"].get<std::string>();
    }
  }
  if (doc.contains("refinement")) {
    const auto& r = doc["refinement"];
    auto& rc = cfg.refinement;
    rc.max_normalized_edit_distance = r.value("max_normalized_edit_distance", rc.max_normalized_edit_distance);
    if (rc.max_normalized_edit_distance < 0.0 || rc.max_normalized_edit_distance > 1.0) {
      throw std::invalid_argument("max_normalized_edit_distance must lie in [0,1]");
    }
    if (r.contains("protected_words")) {
      rc.protected_words.clear();
      for (const auto& w : r["protected_words"]) rc.protected_words.insert(w.get<std::string>());
    }
    rc.llm_pass_enabled = r.value("llm_pass_enabled", rc.llm_pass_enabled);
    if (r.contains("symbols_file")) load_table_file(rc.tables.symbols, base_dir / r["symbols_file"].get<std::string>());
    if (r.contains("confusions_file")) {
      load_table_file(rc.tables.confusions, base_dir / r["confusions_file"].get<std::string>());
    }
  }
  return cfg;
}

AppConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw std::invalid_argument("config " + path.string() + " is not valid JSON");
  return parse_config(doc, path.parent_path());
}

void apply_env_overrides(AppConfig& cfg, const EnvLookup& env) {
  if (auto v = env("CODEVOICE_LISTEN")) cfg.listen = *v;
  if (auto v = env("CODEVOICE_WORKERS")) cfg.workers = static_cast<int>(parse_positive("CODEVOICE_WORKERS", *v));
  if (auto v = env("CODEVOICE_QUEUE_CAPACITY")) {
    cfg.queue_capacity = static_cast<std::size_t>(parse_positive("CODEVOICE_QUEUE_CAPACITY", *v));
  }
  if (auto v = env("CODEVOICE_LOG_DIR")) cfg.log_dir = *v;
  if (auto v = env("CODEVOICE_CORS_ORIGIN")) cfg.cors_origin = *v;
  for (const auto kind : providers::kAllKinds) {
    const std::string prefix = "CODEVOICE_" + std::string(providers::to_string(kind)) + "_";
    const auto endpoint = env(prefix + "ENDPOINT");
    const auto timeout = env(prefix + "TIMEOUT_MS");
    const auto lane = env(prefix + "LANE");
    const auto token = env(prefix + "TOKEN");
    if (!endpoint && !timeout && !lane && !token) continue;
    auto& b = binding_for(cfg, kind);
    if (endpoint) b.endpoint = *endpoint;
    if (timeout) b.timeout = std::chrono::milliseconds(parse_positive(prefix + "TIMEOUT_MS", *timeout));
    if (lane) b.lane = *lane;
    if (token) b.auth_token = *token;
  }
}

void bind_all_mock(AppConfig& cfg) {
  for (const auto kind : providers::kAllKinds) binding_for(cfg, kind).endpoint = std::string(providers::kMockEndpoint);
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument("listen address must be host:port");
  const long port = parse_positive("port", listen.substr(colon + 1));
  if (port > 65535) throw std::invalid_argument("port out of range");
  return {listen.substr(0, colon), static_cast<int>(port)};
}

}  // namespace codevoice
