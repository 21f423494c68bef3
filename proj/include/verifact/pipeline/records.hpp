#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "verifact/corpus.hpp"
#include "verifact/llm/gateway.hpp"

namespace verifact::pipeline {

inline constexpr int kSchemaVersion = 1;

enum class EvidenceMode { Bm25Top1, NeuralTop1, ReaderTop3, Qrel };
std::string_view to_string(EvidenceMode mode) noexcept;
/// Accepts "bm25", "neural", "reader", "qrel".
std::optional<EvidenceMode> evidence_mode_from_string(std::string_view s) noexcept;

enum class GateStatus { Skipped, Yes, No, Unparseable };
std::string_view to_string(GateStatus s) noexcept;

struct GateOutcome {
    GateStatus status = GateStatus::Skipped;
    std::string explanation;
    bool operator==(const GateOutcome&) const = default;
};

enum class Verdict { Yes, No, NotRelated, Unparseable, Error };
std::string_view to_string(Verdict v) noexcept;

/// One question's whole-answer verification trace.
struct VerificationRecord {
    QueryId qid = 0;
    std::string question;
    std::string generated_answer;
    std::string combined_query;
    EvidenceMode mode = EvidenceMode::Bm25Top1;
    std::string evidence_text;
    std::vector<PassageId> evidence_pids;
    GateOutcome gate_generated;
    GateOutcome gate_evidence;
    GateOutcome support;
    Verdict verdict = Verdict::Error;
    bool evidence_empty = false;
    bool evidence_truncated = false;
    std::string error;
    std::vector<llm::LlmExchange> exchanges;
};

enum class FactStatus { Supported, Contradictory, Neither, Unparseable };
std::string_view to_string(FactStatus s) noexcept;

/// One extracted statement's validation trace.
struct FactRecord {
    QueryId qid = 0;
    std::size_t index = 0;  // position in the extracted list
    std::string retriever;
    std::string statement;
    std::string combined_query;
    std::optional<PassageId> evidence_pid;
    std::string evidence_text;
    FactStatus verdict = FactStatus::Neither;
    std::string explanation;
    bool no_evidence = false;
    std::optional<std::string> post_edit;
    bool length_anomaly = false;
    std::vector<llm::LlmExchange> exchanges;
};

struct Segment {
    std::string text;
    PassageId pid = 0;
    std::size_t statement_index = 0;
    bool operator==(const Segment&) const = default;
};

/// Recomposed answer: supported statements verbatim and contradicted ones post-edited,
/// in extraction order, each linked to its evidence passage.
struct AttributedAnswer {
    QueryId qid = 0;
    std::string question;
    std::string generated_answer;
    std::string retriever;
    std::vector<Segment> segments;
    std::vector<std::string> dropped;     // Neither
    std::vector<std::string> unresolved;  // unparseable validation replies
    std::size_t statement_count = 0;
    bool extraction_failure = false;
    std::string error;
    std::vector<llm::LlmExchange> exchanges;

    /// Segments joined by single spaces.
    std::string display_text() const;
};

nlohmann::json to_json(const llm::LlmExchange& ex);
llm::LlmExchange exchange_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VerificationRecord& r);
nlohmann::json to_json(const FactRecord& r);
nlohmann::json to_json(const AttributedAnswer& a);

/// Throw ParseError on schema mismatch or missing fields.
VerificationRecord verification_from_json(const nlohmann::json& j);
FactRecord fact_from_json(const nlohmann::json& j);
AttributedAnswer attributed_from_json(const nlohmann::json& j);

}  // namespace verifact::pipeline
