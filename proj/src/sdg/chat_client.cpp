#include "curate/sdg/chat_client.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "curate/core/parallel.hpp"

namespace curate {

ChatClientOptions ChatClientOptions::from_json(const Json& j) {
  ChatClientOptions o;
  if (!j.is_object()) throw ConfigError("endpoint section must be an object");
  o.base_url = j.value("base_url", o.base_url);
  o.model = j.value("model", o.model);
  o.api_key_env = j.value("api_key_env", o.api_key_env);
  o.timeout_seconds = j.value("timeout_seconds", o.timeout_seconds);
  o.max_attempts = j.value("max_attempts", o.max_attempts);
  o.backoff_base_seconds = j.value("backoff_base_seconds", o.backoff_base_seconds);
  o.backoff_factor = j.value("backoff_factor", o.backoff_factor);
  o.max_in_flight = j.value("max_in_flight", o.max_in_flight);
  o.validate();
  return o;
}

void ChatClientOptions::validate() const {
  if (!base_url.starts_with("http://") && !base_url.starts_with("https://"))
    throw ConfigError("endpoint base_url must start with http:// or https://");
  if (max_attempts == 0) throw ConfigError("endpoint max_attempts must be >= 1");
  if (!(timeout_seconds > 0)) throw ConfigError("endpoint timeout_seconds must be positive");
  if (!(backoff_base_seconds >= 0) || !(backoff_factor >= 1)) throw ConfigError("invalid endpoint backoff settings");
  if (max_in_flight == 0) throw ConfigError("endpoint max_in_flight must be >= 1");
}

Json chat_request_body(const ChatRequest& request, const std::string& model) {
  Json messages = Json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return Json{{"model", model},
              {"messages", std::move(messages)},
              {"temperature", request.temperature},
              {"top_p", request.top_p},
              {"max_tokens", request.max_tokens}};
}

ChatResponse parse_chat_response(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("malformed response JSON: ") + e.what());
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) throw Error("response has no choices");
  const auto& first = (*choices)[0];
  const auto msg = first.find("message");
  if (msg == first.end() || !msg->is_object() || !msg->contains("content") || !(*msg)["content"].is_string())
    throw Error("response choice has no message content");
  ChatResponse r;
  r.content = (*msg)["content"].get<std::string>();
  if (auto fr = first.find("finish_reason"); fr != first.end() && fr->is_string()) r.finish_reason = fr->get<std::string>();
  r.truncated = r.finish_reason == "length";
  return r;
}

ChatClient::ChatClient(ChatClientOptions options) : options_(std::move(options)) {
  options_.validate();
  const auto scheme_end = options_.base_url.find("://") + 3;
  const auto slash = options_.base_url.find('/', scheme_end);
  host_ = options_.base_url.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : options_.base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/chat/completions";
  sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
}

ChatResponse ChatClient::generate(const ChatRequest& request) const {
  httplib::Client cli(host_);
  const auto secs = static_cast<time_t>(options_.timeout_seconds);
  const auto usecs = static_cast<time_t>((options_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);
  const std::string body = chat_request_body(request, options_.model).dump();

  std::string last_error;
  for (std::size_t attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (attempt > 1) {
      sleeper_(options_.backoff_base_seconds * std::pow(options_.backoff_factor, static_cast<double>(attempt - 2)));
    }
    auto res = cli.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      spdlog::warn("request {} attempt {}: {}", request.request_id, attempt, last_error);
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      spdlog::warn("request {} attempt {}: {}", request.request_id, attempt, last_error);
      continue;
    }
    if (res->status != 200) throw GenerationError(request.request_id, "HTTP " + std::to_string(res->status));
    try {
      auto parsed = parse_chat_response(res->body);
      parsed.attempts = attempt;
      return parsed;
    } catch (const Error& e) {
      spdlog::error("request {}: {}", request.request_id, e.what());
      throw GenerationError(request.request_id, e.what());
    }
  }
  throw GenerationError(request.request_id,
                        "gave up after " + std::to_string(options_.max_attempts) + " attempts (" + last_error + ")");
}

std::vector<GenerationOutcome> ChatClient::generate_all(const std::vector<ChatRequest>& requests) const {
  std::vector<GenerationOutcome> out(requests.size());
  parallel_for(requests.size(), options_.max_in_flight, [&](std::size_t i) {
    try {
      out[i].response = generate(requests[i]);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

Generator ChatClient::as_generator() const {
  return [this](const std::vector<ChatRequest>& requests) { return generate_all(requests); };
}

}  // namespace curate
