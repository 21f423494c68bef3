#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "verifact/bm25_index.hpp"
#include "verifact/corpus.hpp"

namespace verifact::testing {

/// Full-scan BM25: recounts every passage from scratch and scores all of them.
class Bm25Oracle {
  public:
    Bm25Oracle(const Corpus& corpus, double k1, double b) : k1_(k1), b_(b) {
        std::uint64_t total = 0;
        corpus.for_each([&](const Passage& p) {
            Doc d;
            d.pid = p.id;
            for (auto& t : tokenize(p.text, corpus.tokenizer())) {
                ++d.tf[t];
                ++d.len;
            }
            for (auto& [t, _] : d.tf) ++df_[t];
            total += d.len;
            docs_.push_back(std::move(d));
        });
        avgdl_ = docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
    }

    double score(const TokenStream& query, PassageId pid) const {
        for (const auto& d : docs_)
            if (d.pid == pid) return score_doc(query, d);
        return 0.0;
    }

    RankedList top_k(const TokenStream& query, std::size_t k) const {
        RankedList all;
        for (const auto& d : docs_) {
            double s = score_doc(query, d);
            if (s > 0.0) all.push_back({d.pid, s});
        }
        std::sort(all.begin(), all.end(), [](const ScoredPassage& x, const ScoredPassage& y) {
            return x.score != y.score ? x.score > y.score : x.pid < y.pid;
        });
        if (all.size() > k) all.resize(k);
        return all;
    }

    std::map<std::string, std::vector<Posting>> postings() const {
        std::map<std::string, std::vector<Posting>> out;
        for (const auto& d : docs_)
            for (auto& [t, f] : d.tf) out[t].push_back({d.pid, f});
        for (auto& [_, list] : out)
            std::sort(list.begin(), list.end(), [](auto& x, auto& y) { return x.pid < y.pid; });
        return out;
    }

    double avg_doc_len() const { return avgdl_; }

  private:
    struct Doc {
        PassageId pid = 0;
        std::map<std::string, std::uint32_t> tf;
        std::uint32_t len = 0;
    };

    double score_doc(const TokenStream& query, const Doc& d) const {
        const double n = static_cast<double>(docs_.size());
        double s = 0.0;
        for (const auto& t : query) {
            auto it = d.tf.find(t);
            if (it == d.tf.end()) continue;
            const double df = static_cast<double>(df_.at(t));
            const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
            const double f = static_cast<double>(it->second);
            const double denom = f + k1_ * (1.0 - b_ + b_ * static_cast<double>(d.len) / avgdl_);
            s += idf * (f * (k1_ + 1.0)) / denom;
        }
        return s;
    }

    double k1_, b_;
    double avgdl_ = 0.0;
    std::vector<Doc> docs_;
    std::map<std::string, std::uint32_t> df_;
};

/// Random small corpus over a tiny vocabulary, so terms repeat and scores tie.
inline Corpus random_corpus(std::mt19937_64& rng, std::size_t max_docs = 50) {
    static const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "river", "stone",
                                                   "music", "song", "light", "water", "house", "tree"};
    std::uniform_int_distribution<std::size_t> ndocs(1, max_docs), len(1, 12), word(0, vocab.size() - 1);
    std::uniform_int_distribution<PassageId> pid(0, 100000);
    std::vector<std::pair<PassageId, std::string>> pairs;
    std::set<PassageId> used;
    std::size_t n = ndocs(rng);
    while (pairs.size() < n) {
        PassageId id = pid(rng);
        if (!used.insert(id).second) continue;
        std::string text;
        std::size_t l = len(rng);
        for (std::size_t i = 0; i < l; ++i) text += (i ? " " : "") + vocab[word(rng)];
        pairs.emplace_back(id, text);
    }
    return Corpus::from_pairs(pairs);
}

inline TokenStream random_query(std::mt19937_64& rng) {
    static const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "river", "stone", "music",
                                                   "song", "light", "water", "house", "tree", "absent"};
    std::uniform_int_distribution<std::size_t> len(1, 5), word(0, vocab.size() - 1);
    std::string q;
    std::size_t l = len(rng);
    for (std::size_t i = 0; i < l; ++i) q += (i ? " " : "") + vocab[word(rng)];
    return tokenize(q);
}

}  // namespace verifact::testing
