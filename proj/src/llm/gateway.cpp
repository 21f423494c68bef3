#include "verifact/llm/gateway.hpp"

#include <algorithm>
#include <thread>

#include "verifact/error.hpp"

namespace verifact::llm {

using namespace std::chrono;

bool is_transient(int status) noexcept {
    return status == 0 || status == 408 || status == 409 || status == 429 || (status >= 500 && status <= 599);
}

LlmGateway::LlmGateway(std::shared_ptr<LlmBackend> backend, LlmSettings settings, Sleeper sleeper)
    : backend_(std::move(backend)),
      settings_(std::move(settings)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](milliseconds d) { std::this_thread::sleep_for(d); })),
      slots_(std::clamp(settings_.concurrency, 1, 1024)) {
    if (!backend_) throw ConfigError("LLM backend not configured");
    if (settings_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
}

void LlmGateway::pace() {
    if (settings_.requests_per_minute <= 0) return;
    const auto interval = duration_cast<steady_clock::duration>(minutes(1)) / settings_.requests_per_minute;
    std::lock_guard lock(pace_mu_);
    auto now = steady_clock::now();
    if (next_slot_ > now) {
        sleeper_(duration_cast<milliseconds>(next_slot_ - now));
        now = std::max(now, next_slot_);
    }
    next_slot_ = std::max(now, next_slot_) + interval;
}

LlmExchange LlmGateway::complete(PromptKind kind, std::string prompt) {
    ChatRequest request{kind, settings_.model, std::move(prompt), settings_.max_response_tokens};

    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};

    BackendReply reply;
    int attempt = 0;
    const auto start = steady_clock::now();
    for (;;) {
        ++attempt;
        pace();
        reply = backend_->send(request);
        if (reply.status == 200) break;
        if (!is_transient(reply.status) || attempt >= settings_.max_attempts)
            throw TransportError(reply.status, "LLM call failed after " + std::to_string(attempt) +
                                                   " attempt(s), status " + std::to_string(reply.status) + ": " +
                                                   reply.error);
        long long backoff = static_cast<long long>(settings_.initial_backoff_ms) << std::min(attempt - 1, 20);
        sleeper_(milliseconds(std::min<long long>(backoff, settings_.max_backoff_ms)));
    }

    LlmExchange ex;
    ex.kind = kind;
    ex.prompt = std::move(request.prompt);
    ex.raw_response = std::move(reply.content);
    ex.model_id = settings_.model;
    ex.latency_ms = duration_cast<milliseconds>(steady_clock::now() - start).count();
    ex.attempt = attempt;
    ex.truncated = reply.finish_reason == "length";
    {
        std::lock_guard lock(stats_mu_);
        ++completed_;
    }
    if (sink_) sink_(ex);
    return ex;
}

std::uint64_t LlmGateway::completed_calls() const {
    std::lock_guard lock(stats_mu_);
    return completed_;
}

}  // namespace verifact::llm
