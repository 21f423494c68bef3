#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "verifact/llm/backend.hpp"

namespace httplib {
class Server;
}

namespace verifact::llm {

/// Serves an LlmBackend over the OpenAI chat-completions protocol. The template of an
/// incoming prompt is recovered from its fixed leading text. Every request body is
/// kept for inspection.
class MockServer {
  public:
    explicit MockServer(std::shared_ptr<LlmBackend> backend);
    ~MockServer();
    MockServer(const MockServer&) = delete;
    MockServer& operator=(const MockServer&) = delete;

    /// Binds (port 0 picks a free port) and serves on a background thread.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Binds and serves on the calling thread until `stop()`.
    bool listen(const std::string& host, int port);
    void stop();

    std::vector<std::string> request_bodies() const;

  private:
    std::shared_ptr<LlmBackend> backend_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    mutable std::mutex mu_;
    std::vector<std::string> bodies_;
};

}  // namespace verifact::llm
