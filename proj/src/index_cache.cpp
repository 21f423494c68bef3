#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "verifact/bm25_index.hpp"
#include "verifact/error.hpp"

namespace verifact {
namespace {

constexpr std::uint8_t kCacheVersion = 1;
constexpr char kMagic[8] = {'V', 'F', 'B', 'M', '2', '5', 'I', 'X'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& in, T& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

template <typename T>
void put_vec(std::ostream& out, const std::vector<T>& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
bool get_vec(std::istream& in, std::vector<T>& v) {
    std::uint64_t n = 0;
    if (!get(in, n)) return false;
    v.resize(n);
    return static_cast<bool>(in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))));
}

bool read_header(std::istream& in, IndexCacheKey& key) {
    std::uint8_t version = 0;
    char magic[8];
    if (!get(in, version) || version != kCacheVersion) return false;
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) return false;
    std::uint32_t flags = 0;
    bool ok = get(in, key.params.k1) && get(in, key.params.b) && get(in, flags) && get(in, key.source_size) &&
              get(in, key.source_mtime);
    key.tokenizer_flags = flags;
    return ok;
}

}  // namespace

void InvertedIndex::save(std::ostream& out) const {
    put(out, params_.k1);
    put(out, params_.b);
    put<std::uint32_t>(out, tokenizer_.flags());
    put(out, total_tokens_);
    put(out, avg_doc_len_);
    put_vec(out, pids_);
    put_vec(out, doc_lens_);
    put<std::uint64_t>(out, terms_.size());
    for (const auto& [term, info] : terms_) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(term.size()));
        out.write(term.data(), static_cast<std::streamsize>(term.size()));
        put(out, info.df);
        put(out, info.offset);
        put(out, info.bytes);
    }
    put_vec(out, blob_);
}

std::optional<InvertedIndex> InvertedIndex::load(std::istream& in) {
    InvertedIndex idx;
    std::uint32_t flags = 0;
    if (!get(in, idx.params_.k1) || !get(in, idx.params_.b) || !get(in, flags) || !get(in, idx.total_tokens_) ||
        !get(in, idx.avg_doc_len_))
        return std::nullopt;
    idx.tokenizer_ = TokenizerOptions::from_flags(flags);
    if (!get_vec(in, idx.pids_) || !get_vec(in, idx.doc_lens_)) return std::nullopt;
    std::uint64_t nterms = 0;
    if (!get(in, nterms)) return std::nullopt;
    idx.terms_.reserve(nterms);
    std::string term;
    for (std::uint64_t i = 0; i < nterms; ++i) {
        std::uint32_t len = 0;
        if (!get(in, len)) return std::nullopt;
        term.resize(len);
        TermInfo info{};
        if (!in.read(term.data(), len) || !get(in, info.df) || !get(in, info.offset) || !get(in, info.bytes))
            return std::nullopt;
        idx.terms_.emplace(term, info);
    }
    if (!get_vec(in, idx.blob_)) return std::nullopt;
    for (const auto& [_, info] : idx.terms_)
        if (info.offset + info.bytes > idx.blob_.size()) return std::nullopt;
    if (idx.doc_lens_.size() != idx.pids_.size()) return std::nullopt;
    return idx;
}

IndexCacheKey IndexCacheKey::for_collection(const std::filesystem::path& collection, const Bm25Params& params,
                                            const TokenizerOptions& tokenizer) {
    IndexCacheKey key;
    key.params = params;
    key.tokenizer_flags = tokenizer.flags();
    key.source_size = std::filesystem::file_size(collection);
    key.source_mtime = std::filesystem::last_write_time(collection).time_since_epoch().count();
    return key;
}

void write_index_cache(const std::filesystem::path& path, const IndexCacheKey& key, const InvertedIndex& index) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write index cache " + tmp.string());
        put(out, kCacheVersion);
        out.write(kMagic, sizeof kMagic);
        put(out, key.params.k1);
        put(out, key.params.b);
        put<std::uint32_t>(out, key.tokenizer_flags);
        put(out, key.source_size);
        put(out, key.source_mtime);
        index.save(out);
        if (!out) throw Error("failed writing index cache " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::optional<InvertedIndex> read_index_cache(const std::filesystem::path& path, const IndexCacheKey& key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    IndexCacheKey stored;
    if (!read_header(in, stored) || !(stored == key)) return std::nullopt;
    return InvertedIndex::load(in);
}

InvertedIndex load_or_build_index(const Corpus& corpus, const std::filesystem::path& collection,
                                  const std::filesystem::path& cache, const Bm25Params& params, bool* rebuilt) {
    auto key = IndexCacheKey::for_collection(collection, params, corpus.tokenizer());
    if (auto idx = read_index_cache(cache, key)) {
        if (rebuilt) *rebuilt = false;
        return std::move(*idx);
    }
    InvertedIndex idx = build_index(corpus, params);
    write_index_cache(cache, key, idx);
    if (rebuilt) *rebuilt = true;
    return idx;
}

}  // namespace verifact
