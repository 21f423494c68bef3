#include "verifact/pipeline/run_log.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <sstream>

#include "verifact/error.hpp"

namespace verifact::pipeline {

using json = nlohmann::json;

namespace {

bool try_create_lock(const std::filesystem::path& lock) {
    int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) return false;
    std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
    return true;
}

bool owner_alive(const std::filesystem::path& lock) {
    std::ifstream in(lock);
    long pid = 0;
    if (!(in >> pid) || pid <= 0) return false;
    return ::kill(static_cast<pid_t>(pid), 0) == 0 || errno == EPERM;
}

}  // namespace

RunLog::RunLog(std::filesystem::path path) : path_(std::move(path)) {
    lock_path_ = path_;
    lock_path_ += ".lock";
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    if (!try_create_lock(lock_path_)) {
        if (owner_alive(lock_path_))
            throw ConfigError("run log " + path_.string() + " is locked by another process (" + lock_path_.string() + ")");
        std::filesystem::remove(lock_path_);
        if (!try_create_lock(lock_path_)) throw ConfigError("cannot lock run log " + path_.string());
    }
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) {
        std::filesystem::remove(lock_path_);
        throw Error("cannot open run log " + path_.string());
    }
}

RunLog::~RunLog() {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(lock_path_, ec);
}

void RunLog::append(const std::vector<json>& lines) {
    std::string buf;
    for (const auto& l : lines) {
        buf += l.dump(-1, ' ', false, json::error_handler_t::replace);
        buf += '\n';
    }
    std::lock_guard lock(mu_);
    out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out_.flush();
    if (!out_) throw Error("write to run log " + path_.string() + " failed");
}

RunLogContents read_run_log(const std::filesystem::path& path) {
    RunLogContents c;
    std::ifstream in(path, std::ios::binary);
    if (!in) return c;
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        bool last_unterminated = end == std::string::npos;
        if (last_unterminated) end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            if (last_unterminated) break;
            throw ParseError(path.string(), line_no, e.what());
        }
        try {
            std::string kind = j.value("kind", "");
            if (kind == "verification")
                c.verifications.push_back(verification_from_json(j));
            else if (kind == "fact")
                c.facts.push_back(fact_from_json(j));
            else if (kind == "recomposed")
                c.answers.push_back(attributed_from_json(j));
            else
                throw ParseError(path.string(), line_no, "unknown record kind '" + kind + "'");
        } catch (const ParseError& e) {
            throw ParseError(path.string(), line_no, e.what());
        }
    }
    return c;
}

}  // namespace verifact::pipeline
