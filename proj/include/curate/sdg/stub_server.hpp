#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <thread>

#include "curate/core/document.hpp"

namespace curate {

struct StubReply {
  int status = 200;
  std::string body;
};

/// Receives the parsed request body (null when it is not JSON) and the
/// 0-based index of the call.
using StubHandler = std::function<StubReply(const Json& request, std::size_t call_index)>;

/// Deterministic completion for a rendered prompt: the output depends only
/// on the prompt kind and the segment text.
std::string stub_completion_text(const std::string& prompt);
/// 200 reply wrapping stub_completion_text of the first message.
StubReply deterministic_stub_reply(const Json& request);
Json stub_response_body(const std::string& content, const std::string& model, const std::string& finish_reason);

// Minimal OpenAI-compatible endpoint on 127.0.0.1 serving
// POST /v1/chat/completions from a background thread.
class StubLlmServer {
 public:
  explicit StubLlmServer(StubHandler handler = {}, int port = 0, const std::string& host = "127.0.0.1");
  ~StubLlmServer();
  StubLlmServer(const StubLlmServer&) = delete;
  StubLlmServer& operator=(const StubLlmServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;  // http://127.0.0.1:<port>/v1
  std::size_t calls() const { return calls_.load(); }
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_ = 0;
  std::atomic<std::size_t> calls_{0};
  std::thread thread_;
};

}  // namespace curate
