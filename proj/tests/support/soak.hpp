#pragma once

// Concurrent HTTP submissions against an all-mock service with lane
// observation and optional transient fault injection.

#include "codevoice/task_state.hpp"

#include <chrono>
#include <future>
#include <string>
#include <vector>

#include "http_rig.hpp"
#include "transports.hpp"

namespace support {

struct SoakOptions {
  int submissions = 50;
  int workers = 4;
  double fault_rate = 0.0;
  std::uint64_t seed = 1;
  std::chrono::milliseconds deadline{10'000};
};

struct SoakResult {
  int accepted = 0;
  int succeeded = 0;
  int failed = 0;
  int failed_unattributed = 0;
  int stuck = 0;
  int illegal_walks = 0;
  int injected = 0;
  std::map<std::string, int> lane_peaks;
  std::chrono::milliseconds elapsed{0};
};

inline bool legal_walk(const codevoice::pipeline::TaskSnapshot& s) {
  using codevoice::pipeline::TaskState;
  if (s.transitions.empty() || s.transitions.front().state != TaskState::Queued) return false;
  for (std::size_t i = 1; i < s.transitions.size(); ++i) {
    if (!codevoice::pipeline::is_legal_transition(s.transitions[i - 1].state, s.transitions[i].state)) return false;
    if (s.transitions[i].at < s.transitions[i - 1].at) return false;
  }
  return s.transitions.back().state == s.state;
}

inline SoakResult run_soak(const SoakOptions& opt) {
  using codevoice::pipeline::TaskState;
  using codevoice::providers::GatewayConfig;
  codevoice::pipeline::OrchestratorConfig cfg;
  cfg.workers = opt.workers;
  HttpRig rig(GatewayConfig::all_mock(), cfg);

  auto counter = std::make_shared<LaneCounter>();
  std::vector<std::shared_ptr<FlakyTransport>> flaky;
  std::uint64_t salt = 0;
  wrap_all(*rig.gateway, [&](ProviderKind kind, std::shared_ptr<Transport> inner) -> std::shared_ptr<Transport> {
    if (opt.fault_rate > 0) {
      flaky.push_back(std::make_shared<FlakyTransport>(inner, opt.fault_rate, opt.seed * 31 + salt++));
      inner = flaky.back();
    }
    return std::make_shared<CountingTransport>(inner, counter, rig.gateway->binding(kind)->lane);
  });
  rig.start();

  const auto started = std::chrono::steady_clock::now();
  std::vector<std::future<std::string>> posts;
  for (int i = 0; i < opt.submissions; ++i) {
    posts.push_back(std::async(std::launch::async, [&rig, i] {
      auto client = rig.client();
      const std::string query = "what is ask key of item underscore " + std::to_string(i);
      const std::string code = "int item_" + std::to_string(i) + ";";
      auto res = client.Post("/api/v1/queries", HttpRig::form(query, i % 2 ? "hi" : "en", code));
      if (!res || res->status != 202) return std::string();
      return nlohmann::json::parse(res->body)["task_id"].get<std::string>();
    }));
  }
  std::vector<std::string> ids;
  for (auto& f : posts) ids.push_back(f.get());

  SoakResult r;
  const auto deadline = started + opt.deadline;
  for (const auto& id : ids) {
    if (id.empty()) continue;
    ++r.accepted;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    const auto snap = rig.orchestrator->wait(id, std::max(left, std::chrono::milliseconds(0)));
    if (!snap) {
      ++r.stuck;
      continue;
    }
    if (!legal_walk(*snap)) ++r.illegal_walks;
    if (snap->state == TaskState::Succeeded) {
      ++r.succeeded;
    } else {
      ++r.failed;
      if (!snap->error || snap->error->stage.empty() || snap->error->provider.empty()) ++r.failed_unattributed;
    }
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  r.lane_peaks = counter->peaks();
  for (const auto& f : flaky) r.injected += f->injected();
  return r;
}

}  // namespace support
