#pragma once

#include "codevoice/language.hpp"
#include "codevoice/refinement.hpp"

#include <json.hpp>

#include <array>
#include <atomic>
#include <utility>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace codevoice::providers {

enum class ProviderKind { AsrEn, AsrIndic, RefinerLlm, Codegen, Tts };

inline constexpr std::array<ProviderKind, 5> kAllKinds = {ProviderKind::AsrEn, ProviderKind::AsrIndic,
                                                          ProviderKind::RefinerLlm, ProviderKind::Codegen,
                                                          ProviderKind::Tts};

std::string_view to_string(ProviderKind kind);  // "ASR_EN", "ASR_INDIC", ...
std::optional<ProviderKind> parse_provider_kind(std::string_view text);

/// Pipeline stage a provider serves: "ASR" for both ASR kinds, otherwise the
/// kind name.
std::string_view stage_name(ProviderKind kind);

/// English goes to the English ASR model, the nine Indic tags to the Indic one.
ProviderKind route_asr(LanguageTag lang);

enum class ProviderErrorCode { Timeout, ProviderError, MockUndecodable };

std::string_view to_string(ProviderErrorCode code);  // "TIMEOUT", "PROVIDER_ERROR", "MOCK_UNDECODABLE"

/// Failure of one provider call, attributed to the stage that made it.
/// status is the HTTP status, or 0 when no response was received.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(ProviderKind stage, ProviderErrorCode code, int status, const std::string& message);

  ProviderKind stage() const { return stage_; }
  ProviderErrorCode code() const { return code_; }
  int status() const { return status_; }

  /// Worth one retry: timeouts, transport failures and 5xx responses.
  bool transient() const;

 private:
  ProviderKind stage_;
  ProviderErrorCode code_;
  int status_;
};

inline constexpr std::string_view kMockEndpoint = "MOCK";

struct ProviderBinding {
  ProviderKind kind = ProviderKind::AsrEn;
  std::string endpoint;  // http(s) URL or "MOCK"
  std::chrono::milliseconds timeout{60'000};
  std::string lane;
  std::optional<std::string> auth_token;

  bool is_mock() const { return endpoint == kMockEndpoint; }
};

struct Lane {
  std::string id;
  int max_concurrent = 1;
};

struct GatewayConfig {
  std::vector<Lane> lanes;
  /// Absent REFINER_LLM / TTS entries mean the stage is disabled.
  std::map<ProviderKind, ProviderBinding> bindings;

  /// Lanes "a" (ASR + refiner) and "b" (codegen + TTS), one slot each.
  static std::vector<Lane> default_lanes();
  static std::string default_lane(ProviderKind kind);
  /// Every kind bound to MOCK on the default lanes.
  static GatewayConfig all_mock();

  /// Throws std::invalid_argument when a required kind is unbound or a
  /// binding names an unknown lane.
  void validate() const;
};

/// Admission gate for one lane: at most max_concurrent holders, waiters
/// admitted in arrival order.
class LaneGate {
 public:
  explicit LaneGate(int max_concurrent);

  class Permit {
   public:
    Permit() = default;
    explicit Permit(LaneGate* gate) : gate_(gate) {}
    Permit(Permit&& other) noexcept : gate_(std::exchange(other.gate_, nullptr)) {}
    Permit& operator=(Permit&& other) noexcept;
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() { release(); }
    void release();

   private:
    LaneGate* gate_ = nullptr;
  };

  Permit acquire();
  int max_concurrent() const { return max_; }
  int in_flight() const;

 private:
  void release();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  const int max_;
  int in_flight_ = 0;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t serving_ = 0;
};

/// Carries one wire request to a provider and returns its JSON response.
/// Implementations throw ProviderError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual nlohmann::json post(ProviderKind kind, const nlohmann::json& request) = 0;
};

/// POSTs the JSON body to the binding's URL with an optional bearer token.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(ProviderBinding binding);
  nlohmann::json post(ProviderKind kind, const nlohmann::json& request) override;

 private:
  ProviderBinding binding_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Deterministic in-process stand-in for every stage:
///   asr    - the audio bytes, if valid UTF-8, are the transcript
///   refine - identity
///   answer - "[mock:<lang>] Q: <query> | code-terms: <shared identifiers>"
///   tts    - one second of 8 kHz mono 16-bit silence as WAV
class MockTransport : public Transport {
 public:
  nlohmann::json post(ProviderKind kind, const nlohmann::json& request) override;
};

/// 44-byte RIFF header plus `seconds` of zero samples.
std::string silent_wav(std::uint32_t sample_rate = 8000, std::uint32_t seconds = 1);

std::string mock_answer(std::string_view query, std::string_view code, LanguageTag lang);

std::string base64_encode(std::string_view bytes);
/// Throws std::invalid_argument on malformed input.
std::string base64_decode(std::string_view text);

struct SynthesizedAudio {
  std::string bytes;
  std::string media_type;
};

/// Binds the pipeline stages to transports and enforces lane limits.
/// Bindings are fixed at construction; replace_transport is for wiring
/// decorators before the gateway is shared.
class ProviderGateway {
 public:
  explicit ProviderGateway(GatewayConfig config);

  const GatewayConfig& config() const { return config_; }
  bool is_bound(ProviderKind kind) const;
  const ProviderBinding* binding(ProviderKind kind) const;

  std::shared_ptr<Transport> transport(ProviderKind kind) const;
  void replace_transport(ProviderKind kind, std::shared_ptr<Transport> transport);

  LaneGate& lane(std::string_view id);

  refine::RawTranscript transcribe(std::string_view audio, std::string_view media_type, LanguageTag lang);
  std::string generate_response(std::string_view refined, std::string_view code, std::string_view problem,
                                LanguageTag lang);
  /// nullopt when TTS is unbound.
  std::optional<SynthesizedAudio> synthesize_speech(std::string_view text, LanguageTag lang);
  std::string refine_llm(std::string_view ruled_text, std::string_view code, LanguageTag lang);

  /// kind -> endpoint (or "MOCK"); unbound optional stages report "DISABLED".
  nlohmann::json health_bindings() const;

 private:
  nlohmann::json call(ProviderKind kind, const nlohmann::json& request);

  GatewayConfig config_;
  std::map<ProviderKind, std::shared_ptr<Transport>> transports_;
  std::map<std::string, std::unique_ptr<LaneGate>, std::less<>> lanes_;
};

}  // namespace codevoice::providers
