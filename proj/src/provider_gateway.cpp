#include "codevoice/provider_gateway.hpp"

#include "codevoice/code_lexicon.hpp"
#include "codevoice/text_util.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <set>

namespace codevoice::providers {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kKindNames = {"ASR_EN", "ASR_INDIC", "REFINER_LLM", "CODEGEN", "TTS"};

void put_le(std::string& out, std::uint32_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

const std::string& require_text(ProviderKind kind, const json& response, bool allow_empty) {
  if (!response.is_object() || !response.contains("text") || !response["text"].is_string()) {
    throw ProviderError(kind, ProviderErrorCode::ProviderError, 200, "response has no \"text\" string");
  }
  const auto& text = response["text"].get_ref<const std::string&>();
  if (!allow_empty && text::normalize_spaces(text).empty()) {
    throw ProviderError(kind, ProviderErrorCode::ProviderError, 200, "empty response text");
  }
  return text;
}

}  // namespace

std::string_view to_string(ProviderKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<ProviderKind> parse_provider_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return kAllKinds[i];
  }
  return std::nullopt;
}

std::string_view stage_name(ProviderKind kind) {
  if (kind == ProviderKind::AsrEn || kind == ProviderKind::AsrIndic) return "ASR";
  return to_string(kind);
}

ProviderKind route_asr(LanguageTag lang) {
  return lang == LanguageTag::English ? ProviderKind::AsrEn : ProviderKind::AsrIndic;
}

std::string_view to_string(ProviderErrorCode code) {
  switch (code) {
    case ProviderErrorCode::Timeout:
      return "TIMEOUT";
    case ProviderErrorCode::ProviderError:
      return "PROVIDER_ERROR";
    case ProviderErrorCode::MockUndecodable:
      break;
  }
  return "MOCK_UNDECODABLE";
}

ProviderError::ProviderError(ProviderKind stage, ProviderErrorCode code, int status, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + (status ? "(" + std::to_string(status) + ")" : "") + ": " +
                         message),
      stage_(stage),
      code_(code),
      status_(status) {}

bool ProviderError::transient() const {
  switch (code_) {
    case ProviderErrorCode::Timeout:
      return true;
    case ProviderErrorCode::ProviderError:
      return status_ == 0 || status_ >= 500;
    case ProviderErrorCode::MockUndecodable:
      break;
  }
  return false;
}

// ---------------------------------------------------------------------------
// configuration

std::vector<Lane> GatewayConfig::default_lanes() { return {Lane{"a", 1}, Lane{"b", 1}}; }

std::string GatewayConfig::default_lane(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::AsrEn:
    case ProviderKind::AsrIndic:
    case ProviderKind::RefinerLlm:
      return "a";
    case ProviderKind::Codegen:
    case ProviderKind::Tts:
      break;
  }
  return "b";
}

GatewayConfig GatewayConfig::all_mock() {
  GatewayConfig cfg;
  cfg.lanes = default_lanes();
  for (const auto kind : kAllKinds) {
    ProviderBinding b;
    b.kind = kind;
    b.endpoint = std::string(kMockEndpoint);
    b.lane = default_lane(kind);
    cfg.bindings[kind] = b;
  }
  return cfg;
}

void GatewayConfig::validate() const {
  std::set<std::string> lane_ids;
  for (const auto& lane : lanes) {
    if (lane.id.empty()) throw std::invalid_argument("lane with empty id");
    if (lane.max_concurrent < 1) throw std::invalid_argument("lane '" + lane.id + "': max_concurrent must be >= 1");
    if (!lane_ids.insert(lane.id).second) throw std::invalid_argument("duplicate lane '" + lane.id + "'");
  }
  for (const auto kind : {ProviderKind::AsrEn, ProviderKind::AsrIndic, ProviderKind::Codegen}) {
    if (!bindings.count(kind)) throw std::invalid_argument("no binding for " + std::string(to_string(kind)));
  }
  for (const auto& [kind, b] : bindings) {
    const std::string name(to_string(kind));
    if (b.kind != kind) throw std::invalid_argument(name + ": binding kind mismatch");
    if (b.endpoint.empty()) throw std::invalid_argument(name + ": empty endpoint");
    if (!b.is_mock() && !b.endpoint.starts_with("http://") && !b.endpoint.starts_with("https://")) {
      throw std::invalid_argument(name + ": endpoint must be an http(s) URL or MOCK");
    }
    if (b.timeout.count() <= 0) throw std::invalid_argument(name + ": timeout must be positive");
    if (!lane_ids.count(b.lane)) throw std::invalid_argument(name + ": unknown lane '" + b.lane + "'");
  }
}

// ---------------------------------------------------------------------------
// lanes

LaneGate::LaneGate(int max_concurrent) : max_(max_concurrent) {
  if (max_concurrent < 1) throw std::invalid_argument("lane width must be >= 1");
}

LaneGate::Permit& LaneGate::Permit::operator=(Permit&& other) noexcept {
  if (this != &other) {
    release();
    gate_ = std::exchange(other.gate_, nullptr);
  }
  return *this;
}

void LaneGate::Permit::release() {
  if (gate_) std::exchange(gate_, nullptr)->release();
}

LaneGate::Permit LaneGate::acquire() {
  std::unique_lock lock(mu_);
  const std::uint64_t ticket = next_ticket_++;
  cv_.wait(lock, [&] { return ticket == serving_ && in_flight_ < max_; });
  ++serving_;
  ++in_flight_;
  lock.unlock();
  cv_.notify_all();
  return Permit(this);
}

void LaneGate::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_all();
}

int LaneGate::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

// ---------------------------------------------------------------------------
// transports

HttpTransport::HttpTransport(ProviderBinding binding) : binding_(std::move(binding)) {
  const auto scheme_end = binding_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("bad endpoint URL: " + binding_.endpoint);
  const auto path_start = binding_.endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    scheme_host_port_ = binding_.endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = binding_.endpoint.substr(0, path_start);
    path_ = binding_.endpoint.substr(path_start);
  }
}

json HttpTransport::post(ProviderKind kind, const json& request) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(binding_.timeout);
  client.set_read_timeout(binding_.timeout);
  client.set_write_timeout(binding_.timeout);
  httplib::Headers headers;
  if (binding_.auth_token && !binding_.auth_token->empty()) {
    headers.emplace("Authorization", "Bearer " + *binding_.auth_token);
  }

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, request.dump(), "application/json");
  if (!res) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || elapsed >= binding_.timeout * 9 / 10) {
      throw ProviderError(kind, ProviderErrorCode::Timeout, 0,
                          "no response within " + std::to_string(binding_.timeout.count()) + " ms");
    }
    throw ProviderError(kind, ProviderErrorCode::ProviderError, 0, httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError(kind, ProviderErrorCode::ProviderError, res->status, res->body);
  }
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw ProviderError(kind, ProviderErrorCode::ProviderError, res->status,
                        res->body.empty() ? "empty response body" : "response is not a JSON object");
  }
  return body;
}

std::string silent_wav(std::uint32_t sample_rate, std::uint32_t seconds) {
  constexpr std::uint16_t channels = 1;
  constexpr std::uint16_t bits = 16;
  const std::uint32_t data_bytes = sample_rate * seconds * channels * (bits / 8);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_le(out, 36 + data_bytes, 4);
  out += "WAVE";
  out += "fmt ";
  put_le(out, 16, 4);
  put_le(out, 1, 2);  // PCM
  put_le(out, channels, 2);
  put_le(out, sample_rate, 4);
  put_le(out, sample_rate * channels * (bits / 8), 4);
  put_le(out, channels * (bits / 8), 2);
  put_le(out, bits, 2);
  out += "data";
  put_le(out, data_bytes, 4);
  out.append(data_bytes, '\0');
  return out;
}

std::string mock_answer(std::string_view query, std::string_view code, LanguageTag lang) {
  const auto code_vocab = lexicon::extract_vocabulary(code, lexicon::detect_source_language(code));
  const auto query_vocab = lexicon::extract_vocabulary(query, lexicon::SourceLanguage::Unknown);
  std::vector<std::string> shared;
  for (const auto& id : query_vocab.identifiers()) {
    if (code_vocab.identifiers().count(id)) shared.push_back(id);
  }
  return "[mock:" + std::string(to_string(lang)) + "] Q: " + std::string(query) +
         " | code-terms: " + text::join(shared, ",");
}

json MockTransport::post(ProviderKind kind, const json& request) {
  const std::string task = request.value("task", "");
  const auto lang = parse_language(request.value("language", "")).value_or(LanguageTag::English);
  if (task == "asr") {
    std::string audio;
    try {
      audio = base64_decode(request.value("audio_b64", ""));
    } catch (const std::invalid_argument& e) {
      throw ProviderError(kind, ProviderErrorCode::ProviderError, 400, e.what());
    }
    if (!text::is_valid_utf8(audio)) {
      throw ProviderError(kind, ProviderErrorCode::MockUndecodable, 0, "mock ASR payload is not UTF-8 text");
    }
    return json{{"text", audio}};
  }
  if (task == "refine") return json{{"text", request.value("text", "")}};
  if (task == "answer") {
    return json{{"text", mock_answer(request.value("query", ""), request.value("code", ""), lang)}};
  }
  if (task == "tts") return json{{"audio_b64", base64_encode(silent_wav())}, {"media_type", "audio/wav"}};
  throw ProviderError(kind, ProviderErrorCode::ProviderError, 400, "unknown task '" + task + "'");
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string compact;
  compact.reserve(text.size());
  for (const char c : text) {
    if (c != '\n' && c != '\r' && c != ' ' && c != '\t') compact += c;
  }
  if (compact.empty()) return {};
  if (compact.size() % 4 != 0) throw std::invalid_argument("base64 length is not a multiple of 4");
  std::string out(3 * compact.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(compact.data()), static_cast<int>(compact.size()));
  if (n < 0) throw std::invalid_argument("malformed base64");
  std::size_t padding = 0;
  if (compact.back() == '=') ++padding;
  if (compact.size() > 1 && compact[compact.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

// ---------------------------------------------------------------------------
// gateway

ProviderGateway::ProviderGateway(GatewayConfig config) : config_(std::move(config)) {
  config_.validate();
  for (const auto& lane : config_.lanes) lanes_.emplace(lane.id, std::make_unique<LaneGate>(lane.max_concurrent));
  auto mock = std::make_shared<MockTransport>();
  for (const auto& [kind, binding] : config_.bindings) {
    if (binding.is_mock()) {
      transports_[kind] = mock;
    } else {
      transports_[kind] = std::make_shared<HttpTransport>(binding);
    }
  }
}

bool ProviderGateway::is_bound(ProviderKind kind) const { return config_.bindings.count(kind) > 0; }

const ProviderBinding* ProviderGateway::binding(ProviderKind kind) const {
  const auto it = config_.bindings.find(kind);
  return it == config_.bindings.end() ? nullptr : &it->second;
}

std::shared_ptr<Transport> ProviderGateway::transport(ProviderKind kind) const {
  const auto it = transports_.find(kind);
  return it == transports_.end() ? nullptr : it->second;
}

void ProviderGateway::replace_transport(ProviderKind kind, std::shared_ptr<Transport> transport) {
  if (!is_bound(kind)) throw std::logic_error("cannot replace transport of unbound " + std::string(to_string(kind)));
  transports_[kind] = std::move(transport);
}

LaneGate& ProviderGateway::lane(std::string_view id) {
  const auto it = lanes_.find(id);
  if (it == lanes_.end()) throw std::out_of_range("unknown lane " + std::string(id));
  return *it->second;
}

json ProviderGateway::call(ProviderKind kind, const json& request) {
  const ProviderBinding* b = binding(kind);
  if (!b) throw std::logic_error(std::string(to_string(kind)) + " is not bound");
  auto transport_ptr = transport(kind);
  auto permit = lane(b->lane).acquire();
  return transport_ptr->post(kind, request);
}

refine::RawTranscript ProviderGateway::transcribe(std::string_view audio, std::string_view media_type,
                                                  LanguageTag lang) {
  if (audio.empty()) throw std::invalid_argument("transcribe: empty audio");
  const ProviderKind kind = route_asr(lang);
  const json request = {{"task", "asr"},
                        {"language", to_string(lang)},
                        {"audio_b64", base64_encode(audio)},
                        {"media_type", media_type}};
  const json response = call(kind, request);
  refine::RawTranscript raw;
  raw.text = require_text(kind, response, true);
  raw.language = lang;
  raw.provider_id = std::string(to_string(kind)) + "@" + binding(kind)->endpoint;
  return raw;
}

std::string ProviderGateway::generate_response(std::string_view refined, std::string_view code,
                                               std::string_view problem, LanguageTag lang) {
  const json request = {{"task", "answer"},
                        {"language", to_string(lang)},
                        {"query", refined},
                        {"code", code},
                        {"problem", problem}};
  return require_text(ProviderKind::Codegen, call(ProviderKind::Codegen, request), false);
}

std::optional<SynthesizedAudio> ProviderGateway::synthesize_speech(std::string_view text, LanguageTag lang) {
  if (!is_bound(ProviderKind::Tts)) return std::nullopt;
  const json request = {{"task", "tts"}, {"language", to_string(lang)}, {"text", text}};
  const json response = call(ProviderKind::Tts, request);
  if (!response.contains("audio_b64") || !response["audio_b64"].is_string()) {
    throw ProviderError(ProviderKind::Tts, ProviderErrorCode::ProviderError, 200, "response has no audio_b64");
  }
  SynthesizedAudio audio;
  try {
    audio.bytes = base64_decode(response["audio_b64"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ProviderError(ProviderKind::Tts, ProviderErrorCode::ProviderError, 200, e.what());
  }
  if (audio.bytes.empty()) throw ProviderError(ProviderKind::Tts, ProviderErrorCode::ProviderError, 200, "empty audio");
  audio.media_type = response.value("media_type", "audio/wav");
  return audio;
}

std::string ProviderGateway::refine_llm(std::string_view ruled_text, std::string_view code, LanguageTag lang) {
  const json request = {{"task", "refine"},
                        {"language", to_string(lang)},
                        {"text", ruled_text},
                        {"code", code},
                        {"goals", refine::refinement_goals()}};
  return require_text(ProviderKind::RefinerLlm, call(ProviderKind::RefinerLlm, request), false);
}

json ProviderGateway::health_bindings() const {
  json out = json::object();
  for (const auto kind : kAllKinds) {
    const ProviderBinding* b = binding(kind);
    out[std::string(to_string(kind))] = b ? b->endpoint : "DISABLED";
  }
  return out;
}

}  // namespace codevoice::providers
