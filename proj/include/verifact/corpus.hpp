#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "verifact/tokenizer.hpp"

namespace verifact {

using PassageId = std::int64_t;
using QueryId = std::int64_t;

struct Passage {
    PassageId id;
    std::string_view text;
};

struct Question {
    QueryId qid;
    std::string text;
    bool operator==(const Question&) const = default;
};

/// Read-only byte buffer: a memory-mapped file or an owned string.
class TextStore {
  public:
    static std::shared_ptr<const TextStore> map_file(const std::filesystem::path& path);
    static std::shared_ptr<const TextStore> own(std::string text);

    TextStore(const TextStore&) = delete;
    TextStore& operator=(const TextStore&) = delete;
    ~TextStore();

    std::string_view view() const noexcept { return {data_, size_}; }

  private:
    TextStore() = default;
    const char* data_ = nullptr;
    std::size_t size_ = 0;
    bool mapped_ = false;
    std::string owned_;
};

/// An immutable passage collection. Passages keep input order; lookups by id go
/// through a sorted side index. Safe for concurrent readers.
class Corpus {
  public:
    Corpus() = default;

    /// Builds a corpus from in-memory pairs. Throws DuplicateKeyError / ParseError
    /// under the same rules as `load_collection`.
    static Corpus from_pairs(const std::vector<std::pair<PassageId, std::string>>& passages,
                             TokenizerOptions tokenizer = {});

    std::size_t doc_count() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    /// Mean token count per passage under this corpus' tokenizer; 0 for an empty corpus.
    /// Computed on first use.
    double avg_doc_len() const;

    const TokenizerOptions& tokenizer() const noexcept { return tokenizer_; }

    /// Passage at input position `i`.
    Passage at(std::size_t i) const;
    std::optional<Passage> find(PassageId id) const;
    bool contains(PassageId id) const { return find(id).has_value(); }

    /// Input positions ordered by ascending passage id.
    const std::vector<std::uint32_t>& id_order() const noexcept { return by_id_; }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < entries_.size(); ++i) f(at(i));
    }

  private:
    friend Corpus load_collection(const std::filesystem::path&, TokenizerOptions);
    struct Entry {
        PassageId id;
        std::uint64_t offset;
        std::uint32_t length;
    };
    void finish_index(const std::vector<std::size_t>& line_numbers);

    std::shared_ptr<const TextStore> store_;
    std::vector<Entry> entries_;
    std::vector<std::uint32_t> by_id_;
    TokenizerOptions tokenizer_;

    struct AvgCache {
        std::once_flag once;
        double value = 0.0;
    };
    std::shared_ptr<AvgCache> avg_ = std::make_shared<AvgCache>();
};

/// Relevance judgments: qid -> relevant pids in file order, duplicates removed.
class QrelSet {
  public:
    void add(QueryId qid, PassageId pid);
    const std::vector<PassageId>* find(QueryId qid) const;
    const std::map<QueryId, std::vector<PassageId>>& all() const noexcept { return judgments_; }
    std::size_t size() const noexcept { return judgments_.size(); }
    bool empty() const noexcept { return judgments_.empty(); }

    /// Throws NotFoundError naming the first judged pid absent from `corpus`.
    void validate_against(const Corpus& corpus) const;

  private:
    std::map<QueryId, std::vector<PassageId>> judgments_;
};

/// `<pid>\t<text>` per line, no header. Throws ParseError (with line number) on a
/// missing tab, non-integer id, or blank text; DuplicateKeyError on a repeated id.
Corpus load_collection(const std::filesystem::path& path, TokenizerOptions tokenizer = {});

/// `<qid>\t<text>` per line; text is everything after the first tab.
std::vector<Question> load_queries(const std::filesystem::path& path);

/// TREC qrels: `<qid> <iter> <pid> <rel>`; lines with rel <= 0 are ignored.
QrelSet load_qrels(const std::filesystem::path& path);

void write_collection(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace verifact
