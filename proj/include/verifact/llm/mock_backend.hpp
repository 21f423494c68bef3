#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "verifact/llm/backend.hpp"

namespace verifact::llm {

/// Offline LLM keyed by (template, SHA-256 of the rendered prompt).
///
/// Fixture file: JSON lines. A keyed line is
///   {"template": "DirectCheck", "prompt_sha256": "<hex>", "response": "Yes."}
/// and may add "fail_first": N to answer HTTP 429 N times before succeeding.
/// A fallback line applies when no keyed fixture matches:
///   {"template": "DirectCheck", "fallback": "Yes."}     ("*" matches any template)
/// Unmatched prompts without a fallback get status 404.
class MockBackend : public LlmBackend {
  public:
    MockBackend() = default;
    static std::shared_ptr<MockBackend> from_file(const std::filesystem::path& path);

    void add_fixture(PromptKind kind, const std::string& prompt_sha256, std::string response, int fail_first = 0);
    void add_fixture_for_prompt(PromptKind kind, std::string_view prompt, std::string response, int fail_first = 0);
    /// `kind == nullopt` matches any template.
    void add_fallback(std::optional<PromptKind> kind, std::string response);

    BackendReply send(const ChatRequest& request) override;

    std::size_t fixture_count() const;
    std::size_t call_count() const;

  private:
    struct Fixture {
        std::string response;
        int failures_left = 0;
    };
    mutable std::mutex mu_;
    std::map<std::pair<PromptKind, std::string>, Fixture> fixtures_;
    std::map<PromptKind, std::string> fallbacks_;
    std::optional<std::string> any_fallback_;
    std::size_t calls_ = 0;
};

}  // namespace verifact::llm
