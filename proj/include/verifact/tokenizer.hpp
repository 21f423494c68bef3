#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace verifact {

struct TokenizerOptions {
    bool stem = true;
    bool remove_stopwords = false;

    /// Packed into index cache headers; any change invalidates a cache.
    unsigned flags() const noexcept { return (stem ? 1u : 0u) | (remove_stopwords ? 2u : 0u); }
    static TokenizerOptions from_flags(unsigned flags) noexcept {
        return {(flags & 1u) != 0, (flags & 2u) != 0};
    }
    bool operator==(const TokenizerOptions&) const = default;
};

/// Normalized terms: lowercase, non-empty, no whitespace.
using TokenStream = std::vector<std::string>;

/// Lowercases ASCII, splits on every ASCII character that is not a letter or digit, and
/// optionally Porter-stems and drops stopwords. Bytes >= 0x80 are kept inside tokens so
/// UTF-8 sequences are never split.
TokenStream tokenize(std::string_view text, const TokenizerOptions& options = {});

/// Streaming form used by the indexer: calls `sink(term)` for every token without
/// materializing the stream. The view is only valid during the call.
template <typename Sink>
void for_each_token(std::string_view text, const TokenizerOptions& options, Sink&& sink);

bool is_stopword(std::string_view term) noexcept;

/// Published Porter (1980) suffix-stripping algorithm, without the length guard or
/// the "bli"/"logi" departures of the reference C code. Input must be lowercase a-z.
std::string porter_stem(std::string_view word);

namespace detail {
inline bool is_token_byte(unsigned char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}
void normalize_token(std::string& token, const TokenizerOptions& options);
}  // namespace detail

template <typename Sink>
void for_each_token(std::string_view text, const TokenizerOptions& options, Sink&& sink) {
    std::string token;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && !detail::is_token_byte(static_cast<unsigned char>(text[i]))) ++i;
        if (i == n) break;
        std::size_t start = i;
        while (i < n && detail::is_token_byte(static_cast<unsigned char>(text[i]))) ++i;
        token.assign(text.substr(start, i - start));
        detail::normalize_token(token, options);
        if (!token.empty()) sink(std::string_view(token));
    }
}

}  // namespace verifact
