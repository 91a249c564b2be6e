#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curate/core/document.hpp"
#include "curate/core/error.hpp"
#include "curate/sdg/prompts.hpp"

namespace curate {

struct ChatClientOptions {
  std::string base_url = "http://127.0.0.1:8000/v1";  // POST <base_url>/chat/completions
  std::string model = "generator";
  std::string api_key_env = "CURATE_API_KEY";  // bearer token, optional
  double timeout_seconds = 120;
  std::size_t max_attempts = 5;
  double backoff_base_seconds = 1.0;
  double backoff_factor = 2.0;
  std::size_t max_in_flight = 4;

  static ChatClientOptions from_json(const Json& j);
  void validate() const;
};

struct ChatRequest {
  std::string request_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.5;
  double top_p = 0.9;
  std::size_t max_tokens = 1024;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  bool truncated = false;  // finish_reason == "length"
  std::size_t attempts = 0;
};

class GenerationError : public Error {
 public:
  GenerationError(const std::string& request_id, const std::string& message)
      : Error("request " + request_id + ": " + message), request_id_(request_id) {}
  const std::string& request_id() const { return request_id_; }

 private:
  std::string request_id_;
};

struct GenerationOutcome {
  std::optional<ChatResponse> response;
  std::string error;  // set when response is empty
};

/// Maps a batch of requests to outcomes with the same indices.
using Generator = std::function<std::vector<GenerationOutcome>(const std::vector<ChatRequest>&)>;

Json chat_request_body(const ChatRequest& request, const std::string& model);
/// Parses choices[0].message.content and finish_reason; throws on malformed JSON.
ChatResponse parse_chat_response(const std::string& body);

// OpenAI-compatible chat-completions client. Timeouts, 429 and 5xx are
// retried with exponential backoff; other failures are returned at once.
class ChatClient {
 public:
  explicit ChatClient(ChatClientOptions options);

  ChatResponse generate(const ChatRequest& request) const;
  /// Up to max_in_flight concurrent requests; output order matches input.
  std::vector<GenerationOutcome> generate_all(const std::vector<ChatRequest>& requests) const;
  Generator as_generator() const;

  /// Replaces the backoff sleep (seconds), mainly for tests.
  void set_sleeper(std::function<void(double)> sleeper) { sleeper_ = std::move(sleeper); }
  const ChatClientOptions& options() const { return options_; }

 private:
  ChatClientOptions options_;
  std::string host_;  // scheme://host[:port]
  std::string path_;  // <prefix>/chat/completions
  std::function<void(double)> sleeper_;
};

}  // namespace curate
