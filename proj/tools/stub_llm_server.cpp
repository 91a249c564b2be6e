#include <csignal>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curate/sdg/stub_server.hpp"

namespace {

curate::StubLlmServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic OpenAI-compatible chat endpoint for tests"};
  int port = 0;
  std::string host = "127.0.0.1";
  app.add_option("--port", port, "port to bind (0 picks a free one)");
  app.add_option("--host", host, "address to bind");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  try {
    curate::StubLlmServer server({}, port, host);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << server.base_url() << std::endl;
    server.wait();
    g_server = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
