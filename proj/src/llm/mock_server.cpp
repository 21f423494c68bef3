#include "verifact/llm/mock_server.hpp"

#include <httplib.h>

#include <json.hpp>

namespace verifact::llm {

using json = nlohmann::json;

namespace {

json error_body(const std::string& message) { return {{"error", {{"message", message}}}}; }

}  // namespace

MockServer::MockServer(std::shared_ptr<LlmBackend> backend)
    : backend_(std::move(backend)), server_(std::make_unique<httplib::Server>()) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(mu_);
            bodies_.push_back(req.body);
        }
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::exception&) {
            res.status = 400;
            res.set_content(error_body("malformed JSON").dump(), "application/json");
            return;
        }
        if (!body.contains("messages") || !body["messages"].is_array() || body["messages"].empty()) {
            res.status = 400;
            res.set_content(error_body("messages required").dump(), "application/json");
            return;
        }
        ChatRequest request;
        request.prompt = body["messages"].back().value("content", "");
        request.model = body.value("model", "");
        request.max_tokens = body.value("max_tokens", 1024);
        auto kind = identify_template(request.prompt);
        if (!kind) {
            res.status = 400;
            res.set_content(error_body("prompt matches no known template").dump(), "application/json");
            return;
        }
        request.kind = *kind;
        BackendReply reply = backend_->send(request);
        if (reply.status != 200) {
            res.status = reply.status == 0 ? 503 : reply.status;
            res.set_content(error_body(reply.error).dump(), "application/json");
            return;
        }
        json out = {
            {"object", "chat.completion"},
            {"model", request.model},
            {"choices",
             json::array({{{"index", 0},
                           {"message", {{"role", "assistant"}, {"content", reply.content}}},
                           {"finish_reason", reply.finish_reason.empty() ? "stop" : reply.finish_reason}}})},
        };
        res.set_content(out.dump(), "application/json");
    };
    server_->Post("/v1/chat/completions", handler);
    server_->Post("/chat/completions", handler);
    server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });
}

MockServer::~MockServer() { stop(); }

int MockServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0)
        bound = server_->bind_to_any_port(host);
    else if (!server_->bind_to_port(host, port))
        bound = -1;
    if (bound < 0) return -1;
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return bound;
}

bool MockServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

void MockServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::vector<std::string> MockServer::request_bodies() const {
    std::lock_guard lock(mu_);
    return bodies_;
}

}  // namespace verifact::llm
