#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include "verifact/llm/backend.hpp"
#include "verifact/llm/templates.hpp"

namespace verifact::llm {

struct LlmSettings {
    std::string model = "gpt-3.5-turbo";
    int max_attempts = 5;
    int initial_backoff_ms = 1000;
    int max_backoff_ms = 30000;
    int max_response_tokens = 1024;
    int requests_per_minute = 0;  // 0 disables rate limiting
    int concurrency = 4;
};

/// A rendered prompt and the model's reply, kept verbatim whether or not it parses.
struct LlmExchange {
    PromptKind kind = PromptKind::Answer;
    std::string prompt;
    std::string raw_response;
    std::string parsed;  // filled in by the caller after parsing
    std::string model_id;
    std::int64_t latency_ms = 0;
    int attempt = 0;
    bool truncated = false;
};

/// Status codes worth retrying: connection failure, timeouts, rate limits, 5xx.
bool is_transient(int status) noexcept;

/// Temperature-0 completion with retry, exponential backoff, a requests-per-minute
/// limiter, and a cap on concurrent in-flight calls. Thread-safe.
class LlmGateway {
  public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    LlmGateway(std::shared_ptr<LlmBackend> backend, LlmSettings settings, Sleeper sleeper = {});

    /// Throws TransportError after the last failed attempt, or at once on a
    /// non-transient status.
    LlmExchange complete(PromptKind kind, std::string prompt);
    LlmExchange complete(PromptKind kind, const Bindings& bindings) {
        return complete(kind, render_prompt(kind, bindings));
    }

    /// Called after every successful completion.
    void set_exchange_sink(std::function<void(const LlmExchange&)> sink) { sink_ = std::move(sink); }

    const LlmSettings& settings() const noexcept { return settings_; }
    std::uint64_t completed_calls() const;

  private:
    void pace();

    std::shared_ptr<LlmBackend> backend_;
    LlmSettings settings_;
    Sleeper sleeper_;
    std::function<void(const LlmExchange&)> sink_;
    std::counting_semaphore<1024> slots_;
    std::mutex pace_mu_;
    std::chrono::steady_clock::time_point next_slot_{};
    mutable std::mutex stats_mu_;
    std::uint64_t completed_ = 0;
};

}  // namespace verifact::llm
