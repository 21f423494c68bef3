#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "verifact/bm25_index.hpp"
#include "verifact/llm/gateway.hpp"

namespace verifact::cli {

/// Settings shared by all subcommands. A config file sets defaults; flags override.
struct RunConfig {
    std::filesystem::path collection;
    std::filesystem::path queries;
    std::filesystem::path qrels;
    std::filesystem::path index_cache;
    std::filesystem::path run_log;
    std::filesystem::path fixtures;  // mock LLM replies; empty means a real endpoint
    std::filesystem::path samples;
    std::filesystem::path audit;

    std::string retriever = "bm25";
    std::vector<std::string> modes = {"bm25"};

    std::string llm_base_url = "https://api.openai.com/v1";
    std::string api_key_env = "VERIFACT_API_KEY";
    std::string neural_url = "http://127.0.0.1:8765";
    llm::LlmSettings llm;
    std::size_t context_budget_chars = 12000;

    Bm25Params bm25;
    std::uint64_t seed = 0;
    std::optional<std::size_t> limit;
    std::size_t parallelism = 4;
};

/// Applies `key = value` lines to `config`. Blank lines and lines starting with '#' are
/// ignored. Unknown keys, malformed values, `temperature`, and any credential key throw
/// ConfigError naming the line.
void apply_config_text(RunConfig& config, std::string_view text, const std::string& source = "<config>");
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace verifact::cli
