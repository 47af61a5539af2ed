#include "codevoice/config.hpp"
#include "codevoice/http_service.hpp"
#include "codevoice/orchestrator.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

namespace {

codevoice::http::HttpService* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codevoice gateway server"};
  std::string config_path;
  std::string listen;
  int workers = 0;
  bool mock_all = false;
  std::string log_dir;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--listen", listen, "host:port (default 127.0.0.1:8466)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--mock-all", mock_all, "bind every provider to the in-process mock");
  app.add_option("--log-dir", log_dir, "request log and blob directory");
  CLI11_PARSE(app, argc, argv);

  codevoice::AppConfig cfg;
  try {
    if (!config_path.empty()) cfg = codevoice::load_config_file(config_path);
    codevoice::apply_env_overrides(cfg, codevoice::process_env);
    if (!listen.empty()) cfg.listen = listen;
    if (workers > 0) cfg.workers = workers;
    if (!log_dir.empty()) cfg.log_dir = log_dir;
    if (mock_all) codevoice::bind_all_mock(cfg);
    cfg.gateway.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  const auto [host, port] = codevoice::parse_listen(cfg.listen);
  auto gateway = std::make_shared<codevoice::providers::ProviderGateway>(cfg.gateway);
  codevoice::pipeline::OrchestratorConfig ocfg;
  ocfg.workers = cfg.workers;
  ocfg.queue_capacity = cfg.queue_capacity;
  ocfg.retained_snapshots = cfg.retained_snapshots;
  ocfg.data_dir = cfg.log_dir;
  ocfg.refinement = cfg.refinement;
  auto orchestrator = std::make_shared<codevoice::pipeline::Orchestrator>(std::move(ocfg), gateway);
  orchestrator->start();

  codevoice::http::HttpOptions options;
  options.cors_origin = cfg.cors_origin;
  codevoice::http::HttpService service(orchestrator, options);
  if (!service.bind(host, port)) {
    std::cerr << "cannot bind " << cfg.listen << '\n';
    return 1;
  }
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  std::cerr << "listening on " << cfg.listen << " (" << cfg.workers << " workers, log " << cfg.log_dir.string()
            << ")\n";
  const auto bindings = gateway->health_bindings();
  for (const auto& [kind, endpoint] : bindings.items()) {
    std::cerr << "  " << kind << " -> " << endpoint.get<std::string>() << '\n';
  }
  service.listen_after_bind();
  g_service = nullptr;
  orchestrator->stop();
  return 0;
}
