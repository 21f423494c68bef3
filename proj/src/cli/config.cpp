#include "verifact/cli/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "verifact/error.hpp"

namespace verifact::cli {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& v) {
    T out{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("not a number: '" + v + "'");
    return out;
}

double parse_double(const std::string& v) {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
    return d;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> m = {
        {"collection", [](RunConfig& c, const std::string& v) { c.collection = v; }},
        {"queries", [](RunConfig& c, const std::string& v) { c.queries = v; }},
        {"qrels", [](RunConfig& c, const std::string& v) { c.qrels = v; }},
        {"index", [](RunConfig& c, const std::string& v) { c.index_cache = v; }},
        {"run", [](RunConfig& c, const std::string& v) { c.run_log = v; }},
        {"fixtures", [](RunConfig& c, const std::string& v) { c.fixtures = v; }},
        {"samples", [](RunConfig& c, const std::string& v) { c.samples = v; }},
        {"audit", [](RunConfig& c, const std::string& v) { c.audit = v; }},
        {"retriever", [](RunConfig& c, const std::string& v) { c.retriever = v; }},
        {"mode", [](RunConfig& c, const std::string& v) { c.modes = split_list(v); }},
        {"llm_url", [](RunConfig& c, const std::string& v) { c.llm_base_url = v; }},
        {"api_key_env", [](RunConfig& c, const std::string& v) { c.api_key_env = v; }},
        {"neural_url", [](RunConfig& c, const std::string& v) { c.neural_url = v; }},
        {"model", [](RunConfig& c, const std::string& v) { c.llm.model = v; }},
        {"max_attempts", [](RunConfig& c, const std::string& v) { c.llm.max_attempts = parse_number<int>(v); }},
        {"initial_backoff_ms", [](RunConfig& c, const std::string& v) { c.llm.initial_backoff_ms = parse_number<int>(v); }},
        {"max_backoff_ms", [](RunConfig& c, const std::string& v) { c.llm.max_backoff_ms = parse_number<int>(v); }},
        {"max_tokens", [](RunConfig& c, const std::string& v) { c.llm.max_response_tokens = parse_number<int>(v); }},
        {"requests_per_minute", [](RunConfig& c, const std::string& v) { c.llm.requests_per_minute = parse_number<int>(v); }},
        {"concurrency", [](RunConfig& c, const std::string& v) { c.llm.concurrency = parse_number<int>(v); }},
        {"parallelism", [](RunConfig& c, const std::string& v) { c.parallelism = parse_number<std::size_t>(v); }},
        {"context_budget", [](RunConfig& c, const std::string& v) { c.context_budget_chars = parse_number<std::size_t>(v); }},
        {"k1", [](RunConfig& c, const std::string& v) { c.bm25.k1 = parse_double(v); }},
        {"b", [](RunConfig& c, const std::string& v) { c.bm25.b = parse_double(v); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>(v); }},
        {"limit", [](RunConfig& c, const std::string& v) { c.limit = parse_number<std::size_t>(v); }},
    };
    return m;
}

}  // namespace

void apply_config_text(RunConfig& config, std::string_view text, const std::string& source) {
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        std::string where = source + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key == "temperature") throw ConfigError(where + ": temperature is fixed at 0");
        if (key == "api_key" || key.find("secret") != std::string::npos || key.find("password") != std::string::npos)
            throw ConfigError(where + ": credentials are read from the environment only (see api_key_env)");
        auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
        try {
            it->second(config, value);
        } catch (const std::exception& e) {
            throw ConfigError(where + ": " + key + ": " + e.what());
        }
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("config file not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(config, ss.str(), path.string());
}

}  // namespace verifact::cli
