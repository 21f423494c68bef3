#pragma once

#include <atomic>
#include <condition_variable>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "verifact/pipeline/records.hpp"

namespace verifact::pipeline {

/// Exclusive append handle on a JSON-lines run log. A sibling `<log>.lock` file holding
/// the owner's pid keeps a second process from writing the same log; a lock left by a
/// dead process is taken over.
class RunLog {
  public:
    explicit RunLog(std::filesystem::path path);
    ~RunLog();
    RunLog(const RunLog&) = delete;
    RunLog& operator=(const RunLog&) = delete;

    /// Appends the lines as one flushed write. Thread-safe.
    void append(const std::vector<nlohmann::json>& lines);
    void append(const nlohmann::json& line) { append(std::vector<nlohmann::json>{line}); }

    const std::filesystem::path& path() const noexcept { return path_; }

  private:
    std::filesystem::path path_;
    std::filesystem::path lock_path_;
    std::ofstream out_;
    std::mutex mu_;
};

struct RunLogContents {
    std::vector<VerificationRecord> verifications;
    std::vector<FactRecord> facts;
    std::vector<AttributedAnswer> answers;

    bool empty() const noexcept { return verifications.empty() && facts.empty() && answers.empty(); }
};

/// Reads every record. A final line cut short by a crash is ignored; any other bad
/// line throws ParseError with its line number. A missing file reads as empty.
RunLogContents read_run_log(const std::filesystem::path& path);

/// Runs `work(i)` for i in [0, n) on up to `width` threads and hands results to
/// `commit(i, result)` strictly in index order, so output order never depends on
/// scheduling. The first exception thrown by `work` is rethrown after all threads stop.
template <typename Result>
void run_ordered(std::size_t n, std::size_t width, const std::function<Result(std::size_t)>& work,
                 const std::function<void(std::size_t, Result&&)>& commit) {
    if (n == 0) return;
    width = std::max<std::size_t>(1, std::min(width, n));
    std::vector<std::optional<Result>> done(n);
    std::atomic<std::size_t> next{0};
    std::size_t next_commit = 0;
    std::mutex mu;
    std::exception_ptr failure;
    std::atomic<bool> stop{false};

    auto worker = [&] {
        for (;;) {
            if (stop.load()) return;
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                Result r = work(i);
                std::lock_guard lock(mu);
                done[i].emplace(std::move(r));
                while (next_commit < n && done[next_commit]) {
                    commit(next_commit, std::move(*done[next_commit]));
                    done[next_commit].reset();
                    ++next_commit;
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                stop = true;
                return;
            }
        }
    };
    if (width == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < width; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace verifact::pipeline
