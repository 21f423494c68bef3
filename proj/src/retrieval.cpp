#include "verifact/retrieval.hpp"

#include <httplib.h>

#include <json.hpp>

#include "verifact/error.hpp"

namespace verifact {

using json = nlohmann::json;

std::vector<RetrievedPassage> Bm25Retriever::retrieve(std::string_view query, std::size_t k) {
    std::vector<RetrievedPassage> out;
    for (const auto& hit : index_.search(query, k)) {
        auto passage = corpus_.find(hit.pid);
        if (!passage) throw NotFoundError("index and corpus disagree on passage " + std::to_string(hit.pid));
        out.push_back({hit.pid, std::string(passage->text), hit.score, {{"bm25", hit.score}}});
    }
    return out;
}

NeuralRetriever::NeuralRetriever(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

ServiceHealth NeuralRetriever::health() const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(5, 0);
    auto res = client.Get("/health");
    if (!res) throw TransportError(0, "neural service unreachable at " + base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError(res->status, "neural service health check failed");
    try {
        json j = json::parse(res->body);
        return {j.value("status", ""), j.value("models_loaded", false), j.value("index_ready", false)};
    } catch (const json::exception& e) {
        throw TransportError(res->status, std::string("malformed health response: ") + e.what());
    }
}

void NeuralRetriever::require_ready() const {
    auto h = health();
    if (!h.green())
        throw TransportError(503, "neural service not ready (models_loaded=" + std::to_string(h.models_loaded) +
                                      ", index_ready=" + std::to_string(h.index_ready) + ")");
}

std::vector<RetrievedPassage> NeuralRetriever::retrieve(std::string_view query, std::size_t k) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    json body = {{"query", std::string(query)}, {"k", k}};
    auto res = client.Post("/retrieve", body.dump(), "application/json");
    if (!res) throw TransportError(0, "neural service unreachable at " + base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError(res->status, "neural /retrieve failed: " + res->body.substr(0, 300));
    std::vector<RetrievedPassage> out;
    try {
        json j = json::parse(res->body);
        for (const auto& c : j.at("candidates")) {
            RetrievedPassage p;
            const auto& pid = c.at("pid");
            p.pid = pid.is_string() ? std::stoll(pid.get<std::string>()) : pid.get<PassageId>();
            p.text = c.at("text").get<std::string>();
            if (c.contains("stage_scores") && c["stage_scores"].is_object())
                for (const auto& [stage, v] : c["stage_scores"].items())
                    if (v.is_number()) p.stage_scores[stage] = v.get<double>();
            for (const char* stage : {"duot5", "monot5"}) {
                if (auto it = p.stage_scores.find(stage); it != p.stage_scores.end()) {
                    p.score = it->second;
                    break;
                }
            }
            out.push_back(std::move(p));
            if (out.size() == k) break;
        }
    } catch (const std::exception& e) {
        throw TransportError(res->status, std::string("malformed /retrieve response: ") + e.what());
    }
    return out;
}

}  // namespace verifact
