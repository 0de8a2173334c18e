#include <csignal>
#include <iostream>
#include <thread>

#include "expleval/log.hpp"
#include "expleval/service.hpp"

using namespace expleval;

namespace {

HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main() {
  try {
    log::set_level(log::Level::Info);
    const auto cfg = ServiceConfig::from_env();
    auto store = open_store(cfg);
    const auto weights = cfg.weights ? load_weights(*cfg.weights) : WeightVector::equal(kAllMetrics.size());
    StudyService service(*store, weights);
    HttpServer server(service);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    server.run(cfg.host, cfg.port, [&](int port) {
      std::cout << "listening on " << cfg.host << ':' << port << std::endl;
    });
    g_server = nullptr;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "expleval_server: " << e.what() << '\n';
    return 1;
  }
}
