#include <httplib.h>

#include <cstdlib>
#include <json.hpp>

#include "verifact/error.hpp"
#include "verifact/llm/backend.hpp"

namespace verifact::llm {

using json = nlohmann::json;

HttpBackend::HttpBackend(std::string base_url, std::string api_key, int timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
    if (api_key_.empty()) throw ConfigError("LLM credential is empty");
    while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("LLM base URL needs a scheme: " + base_url);
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        scheme_host_port_ = base_url;
    } else {
        scheme_host_port_ = base_url.substr(0, path_start);
        path_prefix_ = base_url.substr(path_start);
    }
}

std::unique_ptr<HttpBackend> HttpBackend::from_env(std::string base_url, const std::string& env_var,
                                                   int timeout_seconds) {
    const char* key = std::getenv(env_var.c_str());
    if (!key || !*key) throw ConfigError("environment variable " + env_var + " holding the LLM credential is not set");
    return std::make_unique<HttpBackend>(std::move(base_url), key, timeout_seconds);
}

BackendReply HttpBackend::send(const ChatRequest& request) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    client.set_write_timeout(timeout_seconds_, 0);

    json body = {
        {"model", request.model},
        {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", 0},
        {"max_tokens", request.max_tokens},
    };
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");

    BackendReply reply;
    if (!res) {
        reply.status = 0;
        reply.error = httplib::to_string(res.error());
        return reply;
    }
    reply.status = res->status;
    if (res->status != 200) {
        reply.error = res->body.substr(0, 500);
        return reply;
    }
    try {
        json parsed = json::parse(res->body);
        const auto& choice = parsed.at("choices").at(0);
        reply.content = choice.at("message").at("content").get<std::string>();
        if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
            reply.finish_reason = choice["finish_reason"].get<std::string>();
    } catch (const json::exception& e) {
        reply.status = 502;
        reply.error = std::string("malformed completion body: ") + e.what();
    }
    return reply;
}

}  // namespace verifact::llm
