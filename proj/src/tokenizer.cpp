#include "verifact/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_map>

namespace verifact {
namespace {

// Lucene's default English stop set.
constexpr std::array<std::string_view, 33> kStopwords = {
    "a",    "an",   "and",  "are",  "as",    "at",    "be",   "but",  "by",
    "for",  "if",   "in",   "into", "is",    "it",    "no",   "not",  "of",
    "on",   "or",   "such", "that", "the",   "their", "then", "there", "these",
    "they", "this", "to",   "was",  "will",  "with"};

constexpr std::size_t kStemCacheLimit = 1 << 21;

bool all_lower_alpha(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

const std::string& cached_stem(const std::string& word) {
    thread_local std::unordered_map<std::string, std::string> cache;
    auto it = cache.find(word);
    if (it != cache.end()) return it->second;
    if (cache.size() >= kStemCacheLimit) cache.clear();
    return cache.emplace(word, porter_stem(word)).first->second;
}

}  // namespace

bool is_stopword(std::string_view term) noexcept {
    return std::find(kStopwords.begin(), kStopwords.end(), term) != kStopwords.end();
}

namespace detail {

void normalize_token(std::string& token, const TokenizerOptions& options) {
    for (char& c : token)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (options.remove_stopwords && is_stopword(token)) {
        token.clear();
        return;
    }
    if (options.stem && token.size() > 2 && all_lower_alpha(token)) token = cached_stem(token);
}

}  // namespace detail

TokenStream tokenize(std::string_view text, const TokenizerOptions& options) {
    TokenStream out;
    for_each_token(text, options, [&](std::string_view t) { out.emplace_back(t); });
    return out;
}

}  // namespace verifact
