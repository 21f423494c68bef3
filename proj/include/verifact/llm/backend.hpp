#pragma once

#include <functional>
#include <memory>
#include <string>

#include "verifact/llm/templates.hpp"

namespace verifact::llm {

/// One single-message chat completion. Temperature is part of the wire request
/// but is always 0; it is deliberately not a field here.
struct ChatRequest {
    PromptKind kind;
    std::string model;
    std::string prompt;
    int max_tokens = 1024;
};

struct BackendReply {
    int status = 200;            // HTTP-like status; 0 when the connection failed
    std::string content;
    std::string finish_reason;   // "length" marks a truncated reply
    std::string error;
};

class LlmBackend {
  public:
    virtual ~LlmBackend() = default;
    virtual BackendReply send(const ChatRequest& request) = 0;
};

/// Backend driven by a callable; handy for tests and programmatic "honest" models.
class FunctionBackend : public LlmBackend {
  public:
    using Fn = std::function<BackendReply(const ChatRequest&)>;
    explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}
    BackendReply send(const ChatRequest& request) override { return fn_(request); }

  private:
    Fn fn_;
};

/// OpenAI-compatible `POST {base_url}/chat/completions`.
class HttpBackend : public LlmBackend {
  public:
    HttpBackend(std::string base_url, std::string api_key, int timeout_seconds = 120);

    /// Reads the credential from `env_var`; throws ConfigError when it is unset or empty.
    static std::unique_ptr<HttpBackend> from_env(std::string base_url, const std::string& env_var,
                                                 int timeout_seconds = 120);

    BackendReply send(const ChatRequest& request) override;

  private:
    std::string scheme_host_port_;
    std::string path_prefix_;
    std::string api_key_;
    int timeout_seconds_;
};

}  // namespace verifact::llm
