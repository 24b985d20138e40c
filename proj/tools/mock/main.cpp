// Scripted chat-completion endpoint for local runs of the classify command.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "mock_endpoint.hpp"

namespace {
sentiflow::mock::MockEndpoint* g_endpoint = nullptr;
void on_signal(int) {
  if (g_endpoint) g_endpoint->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scripted mock LLM endpoint"};
  int port = 8000;
  std::string script_path;
  std::string fallback = "neutral";
  int latency_ms = 0;
  app.add_option("--port", port, "Port on 127.0.0.1");
  app.add_option("--script", script_path, "NDJSON of {\"post\", \"reply\"}");
  app.add_option("--default", fallback, "Reply for unscripted posts");
  app.add_option("--latency-ms", latency_ms, "Artificial per-request delay");
  CLI11_PARSE(app, argc, argv);

  try {
    std::map<std::string, std::string> script;
    if (!script_path.empty()) script = sentiflow::mock::load_script(script_path);
    sentiflow::mock::MockEndpoint endpoint(
        sentiflow::mock::scripted_responder(std::move(script), fallback),
        std::chrono::milliseconds(latency_ms), port);
    g_endpoint = &endpoint;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << endpoint.base_url() << std::endl;
    endpoint.wait();
    g_endpoint = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
