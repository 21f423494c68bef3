#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "verifact/corpus.hpp"
#include "verifact/tokenizer.hpp"

namespace verifact {

/// Okapi BM25 free parameters. Defaults are the values tuned for MS MARCO passage
/// ranking by grid search.
struct Bm25Params {
    double k1 = 0.82;
    double b = 0.68;
    bool operator==(const Bm25Params&) const = default;
};

struct Posting {
    PassageId pid;
    std::uint32_t tf;
    bool operator==(const Posting&) const = default;
};

struct ScoredPassage {
    PassageId pid;
    double score;
    bool operator==(const ScoredPassage&) const = default;
};

/// Descending score, ties by ascending passage id.
using RankedList = std::vector<ScoredPassage>;

/// ln(1 + (N - df + 0.5) / (df + 0.5)); non-negative for 0 <= df <= N.
inline double bm25_idf(std::uint64_t doc_count, std::uint64_t df) {
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

/// One query term's contribution for a passage holding it `tf` times.
inline double bm25_term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len, double avg_doc_len,
                               const Bm25Params& p) {
    const double f = static_cast<double>(tf);
    const double norm = p.k1 * (1.0 - p.b + p.b * static_cast<double>(doc_len) / avg_doc_len);
    return idf * (f * (p.k1 + 1.0)) / (f + norm);
}

/// Immutable inverted index. Internal document numbers follow ascending passage id, so
/// every postings list is sorted by passage id. Postings are stored as varint
/// (doc-gap, tf) pairs in one contiguous buffer. `search` is safe to call from many
/// threads at once.
class InvertedIndex {
  public:
    InvertedIndex() = default;

    std::size_t doc_count() const noexcept { return pids_.size(); }
    double avg_doc_len() const noexcept { return avg_doc_len_; }
    std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    const Bm25Params& params() const noexcept { return params_; }
    const TokenizerOptions& tokenizer() const noexcept { return tokenizer_; }
    std::size_t vocabulary_size() const noexcept { return terms_.size(); }

    std::uint32_t document_frequency(std::string_view term) const;
    std::vector<Posting> postings(std::string_view term) const;
    std::vector<std::string> vocabulary() const;

    /// Throws NotFoundError for an unknown pid.
    std::uint32_t doc_len(PassageId pid) const;

    /// Sum over query terms (with repetition) of the per-term BM25 weight. Terms absent
    /// from the passage contribute 0. Throws NotFoundError for an unknown pid.
    double score(const TokenStream& query_terms, PassageId pid) const;

    /// Top-k passages with positive score, touching only the postings of query terms.
    RankedList search_terms(const TokenStream& query_terms, std::size_t k) const;
    RankedList search(std::string_view query, std::size_t k) const;

    void save(std::ostream& out) const;
    /// Returns nullopt when the stream is not a cache of the current format version.
    static std::optional<InvertedIndex> load(std::istream& in);

  private:
    friend InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params);
    struct TermInfo {
        std::uint32_t df;
        std::uint64_t offset;
        std::uint64_t bytes;
    };
    std::optional<std::uint32_t> internal_doc(PassageId pid) const;
    template <typename F>
    void decode(const TermInfo& info, F&& f) const;

    Bm25Params params_;
    TokenizerOptions tokenizer_;
    std::vector<PassageId> pids_;
    std::vector<std::uint32_t> doc_lens_;
    std::uint64_t total_tokens_ = 0;
    double avg_doc_len_ = 0.0;
    std::unordered_map<std::string, TermInfo> terms_;
    std::vector<std::uint8_t> blob_;
};

/// Throws Error on an empty corpus.
InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params = {});

/// Identifies what an on-disk cache was built from; any field change invalidates it.
struct IndexCacheKey {
    Bm25Params params;
    unsigned tokenizer_flags = 0;
    std::uint64_t source_size = 0;
    std::int64_t source_mtime = 0;
    bool operator==(const IndexCacheKey&) const = default;

    static IndexCacheKey for_collection(const std::filesystem::path& collection, const Bm25Params& params,
                                        const TokenizerOptions& tokenizer);
};

/// Cache file layout (little-endian):
///   u8 version | "VFBM25IX" | f64 k1 | f64 b | u32 tokenizer flags | u64 source size |
///   i64 source mtime | serialized InvertedIndex
void write_index_cache(const std::filesystem::path& path, const IndexCacheKey& key, const InvertedIndex& index);

/// nullopt when the file is missing, from another format version, or built with a
/// different key.
std::optional<InvertedIndex> read_index_cache(const std::filesystem::path& path, const IndexCacheKey& key);

/// Loads a valid cache or rebuilds (and rewrites) it. `rebuilt` reports which happened.
InvertedIndex load_or_build_index(const Corpus& corpus, const std::filesystem::path& collection,
                                  const std::filesystem::path& cache, const Bm25Params& params,
                                  bool* rebuilt = nullptr);

}  // namespace verifact
