#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "verifact/bm25_index.hpp"
#include "verifact/corpus.hpp"

namespace verifact {

struct RetrievedPassage {
    PassageId pid;
    std::string text;
    double score = 0.0;
    std::map<std::string, double> stage_scores;
};

class Retriever {
  public:
    virtual ~Retriever() = default;
    /// At most `k` passages, best first. An empty result is not an error.
    virtual std::vector<RetrievedPassage> retrieve(std::string_view query, std::size_t k) = 0;
    virtual std::string name() const = 0;
};

class Bm25Retriever : public Retriever {
  public:
    Bm25Retriever(const InvertedIndex& index, const Corpus& corpus) : index_(index), corpus_(corpus) {}
    std::vector<RetrievedPassage> retrieve(std::string_view query, std::size_t k) override;
    std::string name() const override { return "bm25"; }

  private:
    const InvertedIndex& index_;
    const Corpus& corpus_;
};

struct ServiceHealth {
    std::string status;
    bool models_loaded = false;
    bool index_ready = false;
    bool green() const noexcept { return models_loaded && index_ready; }
};

/// Client for the neural retrieval sidecar:
///   POST /retrieve {"query", "k"} -> {"candidates": [{"pid", "text", "stage_scores"}]}
///   GET  /health -> {"status", "models_loaded", "index_ready"}
/// Throws TransportError when the service is unreachable or answers non-200.
class NeuralRetriever : public Retriever {
  public:
    explicit NeuralRetriever(std::string base_url, int timeout_seconds = 300);

    ServiceHealth health() const;
    /// Throws TransportError unless the service reports ready.
    void require_ready() const;

    std::vector<RetrievedPassage> retrieve(std::string_view query, std::size_t k) override;
    std::string name() const override { return "neural"; }

  private:
    std::string base_url_;
    int timeout_seconds_;
};

}  // namespace verifact
