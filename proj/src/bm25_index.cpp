#include "verifact/bm25_index.hpp"

#include <algorithm>
#include <queue>

#include "verifact/error.hpp"

namespace verifact {
namespace {

void put_varint(std::vector<std::uint8_t>& out, std::uint32_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_varint(const std::uint8_t*& p) {
    std::uint32_t v = 0;
    int shift = 0;
    while (*p & 0x80) {
        v |= static_cast<std::uint32_t>(*p++ & 0x7f) << shift;
        shift += 7;
    }
    v |= static_cast<std::uint32_t>(*p++) << shift;
    return v;
}

struct GrowingList {
    std::vector<std::uint8_t> bytes;
    std::uint32_t df = 0;
    std::uint32_t last_doc = 0;
};

// Worse-first ordering so the heap top is the weakest kept candidate.
struct WorseFirst {
    bool operator()(const ScoredPassage& a, const ScoredPassage& b) const {
        if (a.score != b.score) return a.score > b.score;
        return a.pid < b.pid;
    }
};

bool ranks_before(const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pid < b.pid;
}

}  // namespace

template <typename F>
void InvertedIndex::decode(const TermInfo& info, F&& f) const {
    const std::uint8_t* p = blob_.data() + info.offset;
    std::uint32_t doc = 0;
    for (std::uint32_t i = 0; i < info.df; ++i) {
        doc += get_varint(p);
        std::uint32_t tf = get_varint(p);
        f(doc, tf);
    }
}

InvertedIndex build_index(const Corpus& corpus, const Bm25Params& params) {
    if (corpus.empty()) throw Error("cannot build an index over an empty corpus");
    InvertedIndex index;
    index.params_ = params;
    index.tokenizer_ = corpus.tokenizer();
    const std::size_t n = corpus.doc_count();
    index.pids_.reserve(n);
    index.doc_lens_.reserve(n);

    std::unordered_map<std::string, std::uint32_t> term_ids;
    std::vector<std::string> term_names;
    std::vector<GrowingList> lists;
    std::vector<std::uint32_t> doc_terms;
    std::string key;

    std::uint32_t doc = 0;
    for (std::uint32_t pos : corpus.id_order()) {
        Passage p = corpus.at(pos);
        doc_terms.clear();
        for_each_token(p.text, corpus.tokenizer(), [&](std::string_view t) {
            key.assign(t);
            auto [it, inserted] = term_ids.try_emplace(key, static_cast<std::uint32_t>(term_names.size()));
            if (inserted) {
                term_names.push_back(key);
                lists.emplace_back();
            }
            doc_terms.push_back(it->second);
        });
        index.pids_.push_back(p.id);
        index.doc_lens_.push_back(static_cast<std::uint32_t>(doc_terms.size()));
        index.total_tokens_ += doc_terms.size();

        std::sort(doc_terms.begin(), doc_terms.end());
        for (std::size_t i = 0; i < doc_terms.size();) {
            std::size_t j = i;
            while (j < doc_terms.size() && doc_terms[j] == doc_terms[i]) ++j;
            GrowingList& list = lists[doc_terms[i]];
            put_varint(list.bytes, list.df == 0 ? doc : doc - list.last_doc);
            put_varint(list.bytes, static_cast<std::uint32_t>(j - i));
            list.last_doc = doc;
            ++list.df;
            i = j;
        }
        ++doc;
    }
    index.avg_doc_len_ = static_cast<double>(index.total_tokens_) / static_cast<double>(n);

    std::uint64_t total_bytes = 0;
    for (const auto& l : lists) total_bytes += l.bytes.size();
    index.blob_.reserve(total_bytes);
    index.terms_.reserve(term_names.size());
    for (std::size_t t = 0; t < term_names.size(); ++t) {
        GrowingList& l = lists[t];
        index.terms_.emplace(std::move(term_names[t]),
                             InvertedIndex::TermInfo{l.df, index.blob_.size(), l.bytes.size()});
        index.blob_.insert(index.blob_.end(), l.bytes.begin(), l.bytes.end());
        std::vector<std::uint8_t>().swap(l.bytes);
    }
    return index;
}

std::optional<std::uint32_t> InvertedIndex::internal_doc(PassageId pid) const {
    auto it = std::lower_bound(pids_.begin(), pids_.end(), pid);
    if (it == pids_.end() || *it != pid) return std::nullopt;
    return static_cast<std::uint32_t>(it - pids_.begin());
}

std::uint32_t InvertedIndex::document_frequency(std::string_view term) const {
    auto it = terms_.find(std::string(term));
    return it == terms_.end() ? 0 : it->second.df;
}

std::vector<Posting> InvertedIndex::postings(std::string_view term) const {
    std::vector<Posting> out;
    auto it = terms_.find(std::string(term));
    if (it == terms_.end()) return out;
    out.reserve(it->second.df);
    decode(it->second, [&](std::uint32_t doc, std::uint32_t tf) { out.push_back({pids_[doc], tf}); });
    return out;
}

std::vector<std::string> InvertedIndex::vocabulary() const {
    std::vector<std::string> out;
    out.reserve(terms_.size());
    for (const auto& [term, _] : terms_) out.push_back(term);
    std::sort(out.begin(), out.end());
    return out;
}

std::uint32_t InvertedIndex::doc_len(PassageId pid) const {
    auto doc = internal_doc(pid);
    if (!doc) throw NotFoundError("passage " + std::to_string(pid) + " is not in the index");
    return doc_lens_[*doc];
}

double InvertedIndex::score(const TokenStream& query_terms, PassageId pid) const {
    auto doc = internal_doc(pid);
    if (!doc) throw NotFoundError("passage " + std::to_string(pid) + " is not in the index");
    double total = 0.0;
    for (const auto& term : query_terms) {
        auto it = terms_.find(term);
        if (it == terms_.end()) continue;
        std::uint32_t tf = 0;
        decode(it->second, [&](std::uint32_t d, std::uint32_t f) {
            if (d == *doc) tf = f;
        });
        if (tf == 0) continue;
        total += bm25_term_weight(bm25_idf(doc_count(), it->second.df), tf, doc_lens_[*doc], avg_doc_len_, params_);
    }
    return total;
}

RankedList InvertedIndex::search_terms(const TokenStream& query_terms, std::size_t k) const {
    RankedList out;
    if (k == 0 || pids_.empty()) return out;

    thread_local std::vector<double> acc;
    thread_local std::vector<std::uint32_t> touched;
    if (acc.size() < pids_.size()) acc.assign(pids_.size(), 0.0);
    touched.clear();

    for (const auto& term : query_terms) {
        auto it = terms_.find(term);
        if (it == terms_.end()) continue;
        const double idf = bm25_idf(doc_count(), it->second.df);
        decode(it->second, [&](std::uint32_t d, std::uint32_t tf) {
            if (acc[d] == 0.0) touched.push_back(d);
            acc[d] += bm25_term_weight(idf, tf, doc_lens_[d], avg_doc_len_, params_);
        });
    }

    std::priority_queue<ScoredPassage, std::vector<ScoredPassage>, WorseFirst> heap;
    for (std::uint32_t d : touched) {
        ScoredPassage cand{pids_[d], acc[d]};
        acc[d] = 0.0;
        if (!(cand.score > 0.0)) continue;
        if (heap.size() < k) {
            heap.push(cand);
        } else if (ranks_before(cand, heap.top())) {
            heap.pop();
            heap.push(cand);
        }
    }
    out.resize(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = heap.top();
        heap.pop();
    }
    return out;
}

RankedList InvertedIndex::search(std::string_view query, std::size_t k) const {
    return search_terms(tokenize(query, tokenizer_), k);
}

}  // namespace verifact
