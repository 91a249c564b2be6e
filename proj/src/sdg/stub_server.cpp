#include "curate/sdg/stub_server.hpp"

#include <httplib.h>

#include "curate/core/error.hpp"
#include "curate/core/hashing.hpp"
#include "curate/sdg/chunker.hpp"
#include "curate/sdg/prompts.hpp"

namespace curate {

struct StubLlmServer::Impl {
  httplib::Server server;
};

std::string stub_completion_text(const std::string& prompt) {
  const auto kind = detect_prompt_kind(prompt);
  const auto segment = extract_segment(prompt);
  if (!kind || !segment) return prompt;
  const auto lines = content_lines_of(*segment);
  std::string out;
  switch (*kind) {
    case PromptKind::Wikipedia:
      out = "Here is a paraphrased version:\n";
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back(' ');
        out.append(lines[i]);
      }
      break;
    case PromptKind::DiverseQA:
      out = "Here are the questions and answers based on the provided text:\n";
      for (std::size_t i = 0; i < lines.size() && i < 10; ++i) {
        out.append("- Question: What does line ").append(std::to_string(i + 1));
        out.append(" of the text state? Answer: ").append(lines[i]).append("\n");
      }
      break;
    case PromptKind::Distill:
      out = "**Condensed version.** ";
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back(' ');
        out.append(lines[i]);
      }
      break;
    case PromptKind::ExtractKnowledge:
      out = "The passage explains the following. ";
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out.push_back(' ');
        out.append(lines[i]);
      }
      break;
    case PromptKind::KnowledgeList:
      for (const auto& l : lines) out.append("- ").append(l).append("\n");
      break;
  }
  return out;
}

Json stub_response_body(const std::string& content, const std::string& model, const std::string& finish_reason) {
  return Json{{"id", "stub-" + std::to_string(fnv1a64(content))},
              {"object", "chat.completion"},
              {"model", model},
              {"choices",
               Json::array({Json{{"index", 0},
                                 {"message", {{"role", "assistant"}, {"content", content}}},
                                 {"finish_reason", finish_reason}}})}};
}

StubReply deterministic_stub_reply(const Json& request) {
  if (!request.is_object() || !request.contains("messages") || !request["messages"].is_array() ||
      request["messages"].empty())
    return {400, R"({"error":"messages required"})"};
  const auto& msg = request["messages"][0];
  const std::string prompt = msg.value("content", std::string());
  return {200, stub_response_body(stub_completion_text(prompt), request.value("model", std::string("stub")), "stop").dump()};
}

StubLlmServer::StubLlmServer(StubHandler handler, int port, const std::string& host)
    : impl_(std::make_unique<Impl>()), host_(host) {
  if (!handler) handler = [](const Json& req, std::size_t) { return deterministic_stub_reply(req); };
  auto route = [this, handler](const httplib::Request& req, httplib::Response& res) {
    const std::size_t index = calls_.fetch_add(1);
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded()) body = nullptr;
    const auto reply = handler(body, index);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  impl_->server.Post("/v1/chat/completions", route);
  impl_->server.Post("/chat/completions", route);
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else {
    port_ = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) throw Error("stub server could not bind " + host);
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubLlmServer::~StubLlmServer() { stop(); }

std::string StubLlmServer::base_url() const { return "http://" + host_ + ":" + std::to_string(port_) + "/v1"; }

void StubLlmServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void StubLlmServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace curate
