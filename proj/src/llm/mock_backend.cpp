#include "verifact/llm/mock_backend.hpp"

#include <fstream>
#include <json.hpp>

#include "verifact/error.hpp"
#include "verifact/hash.hpp"

namespace verifact::llm {

using json = nlohmann::json;

std::shared_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("mock fixture file not found: " + path.string());
    auto mock = std::make_shared<MockBackend>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            json j = json::parse(line);
            std::string name = j.at("template").get<std::string>();
            std::optional<PromptKind> kind;
            if (name != "*") {
                kind = prompt_kind_from_string(name);
                if (!kind) throw ParseError(path.string(), line_no, "unknown template '" + name + "'");
            }
            if (j.contains("fallback")) {
                mock->add_fallback(kind, j.at("fallback").get<std::string>());
            } else {
                if (!kind) throw ParseError(path.string(), line_no, "keyed fixture needs a concrete template");
                mock->add_fixture(*kind, j.at("prompt_sha256").get<std::string>(), j.at("response").get<std::string>(),
                                  j.value("fail_first", 0));
            }
        } catch (const json::exception& e) {
            throw ParseError(path.string(), line_no, e.what());
        }
    }
    return mock;
}

void MockBackend::add_fixture(PromptKind kind, const std::string& prompt_sha256, std::string response,
                              int fail_first) {
    std::lock_guard lock(mu_);
    fixtures_[{kind, prompt_sha256}] = Fixture{std::move(response), fail_first};
}

void MockBackend::add_fixture_for_prompt(PromptKind kind, std::string_view prompt, std::string response,
                                         int fail_first) {
    add_fixture(kind, sha256_hex(prompt), std::move(response), fail_first);
}

void MockBackend::add_fallback(std::optional<PromptKind> kind, std::string response) {
    std::lock_guard lock(mu_);
    if (kind)
        fallbacks_[*kind] = std::move(response);
    else
        any_fallback_ = std::move(response);
}

BackendReply MockBackend::send(const ChatRequest& request) {
    std::lock_guard lock(mu_);
    ++calls_;
    BackendReply reply;
    reply.finish_reason = "stop";
    auto it = fixtures_.find({request.kind, sha256_hex(request.prompt)});
    if (it != fixtures_.end()) {
        if (it->second.failures_left > 0) {
            --it->second.failures_left;
            return {429, "", "", "scripted rate limit"};
        }
        reply.content = it->second.response;
        return reply;
    }
    if (auto fb = fallbacks_.find(request.kind); fb != fallbacks_.end()) {
        reply.content = fb->second;
        return reply;
    }
    if (any_fallback_) {
        reply.content = *any_fallback_;
        return reply;
    }
    return {404, "", "", "no fixture for " + std::string(to_string(request.kind)) + " prompt"};
}

std::size_t MockBackend::fixture_count() const {
    std::lock_guard lock(mu_);
    return fixtures_.size();
}

std::size_t MockBackend::call_count() const {
    std::lock_guard lock(mu_);
    return calls_;
}

}  // namespace verifact::llm
