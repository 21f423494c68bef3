#include "verifact/pipeline/records.hpp"

#include "verifact/error.hpp"

namespace verifact::pipeline {

using json = nlohmann::json;

std::string_view to_string(EvidenceMode mode) noexcept {
    switch (mode) {
    case EvidenceMode::Bm25Top1: return "bm25";
    case EvidenceMode::NeuralTop1: return "neural";
    case EvidenceMode::ReaderTop3: return "reader";
    case EvidenceMode::Qrel: return "qrel";
    }
    return "?";
}

std::optional<EvidenceMode> evidence_mode_from_string(std::string_view s) noexcept {
    for (auto m : {EvidenceMode::Bm25Top1, EvidenceMode::NeuralTop1, EvidenceMode::ReaderTop3, EvidenceMode::Qrel})
        if (to_string(m) == s) return m;
    return std::nullopt;
}

std::string_view to_string(GateStatus s) noexcept {
    switch (s) {
    case GateStatus::Skipped: return "Skipped";
    case GateStatus::Yes: return "Yes";
    case GateStatus::No: return "No";
    case GateStatus::Unparseable: return "Unparseable";
    }
    return "?";
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Yes: return "Yes";
    case Verdict::No: return "No";
    case Verdict::NotRelated: return "NotRelated";
    case Verdict::Unparseable: return "Unparseable";
    case Verdict::Error: return "Error";
    }
    return "?";
}

std::string_view to_string(FactStatus s) noexcept {
    switch (s) {
    case FactStatus::Supported: return "Supported";
    case FactStatus::Contradictory: return "Contradictory";
    case FactStatus::Neither: return "Neither";
    case FactStatus::Unparseable: return "Unparseable";
    }
    return "?";
}

std::string AttributedAnswer::display_text() const {
    std::string out;
    for (const auto& s : segments) {
        if (!out.empty()) out += ' ';
        out += s.text;
    }
    return out;
}

namespace {

template <typename Enum, std::size_t N>
Enum enum_from(const json& j, const char* field, const Enum (&values)[N]) {
    std::string s = j.at(field).get<std::string>();
    for (Enum v : values)
        if (to_string(v) == s) return v;
    throw ParseError("run log", 0, std::string("bad value '") + s + "' for " + field);
}

constexpr GateStatus kGateValues[] = {GateStatus::Skipped, GateStatus::Yes, GateStatus::No, GateStatus::Unparseable};
constexpr Verdict kVerdictValues[] = {Verdict::Yes, Verdict::No, Verdict::NotRelated, Verdict::Unparseable,
                                      Verdict::Error};
constexpr FactStatus kFactValues[] = {FactStatus::Supported, FactStatus::Contradictory, FactStatus::Neither,
                                      FactStatus::Unparseable};

json gate_json(const GateOutcome& g) { return {{"status", to_string(g.status)}, {"explanation", g.explanation}}; }

GateOutcome gate_from(const json& j) {
    return {enum_from(j, "status", kGateValues), j.value("explanation", "")};
}

json exchanges_json(const std::vector<llm::LlmExchange>& xs) {
    json arr = json::array();
    for (const auto& x : xs) arr.push_back(to_json(x));
    return arr;
}

std::vector<llm::LlmExchange> exchanges_from(const json& j) {
    std::vector<llm::LlmExchange> out;
    if (j.contains("exchanges"))
        for (const auto& x : j.at("exchanges")) out.push_back(exchange_from_json(x));
    return out;
}

void check_schema(const json& j, const char* kind) {
    if (j.value("schema", -1) != kSchemaVersion)
        throw ParseError("run log", 0, "unsupported schema version " + j.value("schema", json(-1)).dump());
    if (j.value("kind", "") != kind) throw ParseError("run log", 0, std::string("expected record kind ") + kind);
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError("run log", 0, e.what());
    }
}

}  // namespace

json to_json(const llm::LlmExchange& ex) {
    return {{"template", llm::to_string(ex.kind)}, {"prompt", ex.prompt},       {"raw_response", ex.raw_response},
            {"parsed", ex.parsed},                 {"model_id", ex.model_id},   {"latency_ms", ex.latency_ms},
            {"attempt", ex.attempt},               {"truncated", ex.truncated}};
}

llm::LlmExchange exchange_from_json(const json& j) {
    llm::LlmExchange ex;
    auto kind = llm::prompt_kind_from_string(j.at("template").get<std::string>());
    if (!kind) throw ParseError("run log", 0, "unknown template in exchange");
    ex.kind = *kind;
    ex.prompt = j.at("prompt").get<std::string>();
    ex.raw_response = j.at("raw_response").get<std::string>();
    ex.parsed = j.value("parsed", "");
    ex.model_id = j.value("model_id", "");
    ex.latency_ms = j.value("latency_ms", std::int64_t{0});
    ex.attempt = j.value("attempt", 0);
    ex.truncated = j.value("truncated", false);
    return ex;
}

json to_json(const VerificationRecord& r) {
    return {{"schema", kSchemaVersion},
            {"kind", "verification"},
            {"qid", r.qid},
            {"question", r.question},
            {"generated_answer", r.generated_answer},
            {"combined_query", r.combined_query},
            {"evidence_mode", to_string(r.mode)},
            {"evidence_text", r.evidence_text},
            {"evidence_pids", r.evidence_pids},
            {"gate_generated", gate_json(r.gate_generated)},
            {"gate_evidence", gate_json(r.gate_evidence)},
            {"support", gate_json(r.support)},
            {"verdict", to_string(r.verdict)},
            {"evidence_empty", r.evidence_empty},
            {"evidence_truncated", r.evidence_truncated},
            {"error", r.error},
            {"exchanges", exchanges_json(r.exchanges)}};
}

VerificationRecord verification_from_json(const json& j) {
    check_schema(j, "verification");
    return guarded([&] {
        VerificationRecord r;
        r.qid = j.at("qid").get<QueryId>();
        r.question = j.at("question").get<std::string>();
        r.generated_answer = j.at("generated_answer").get<std::string>();
        r.combined_query = j.value("combined_query", "");
        auto mode = evidence_mode_from_string(j.at("evidence_mode").get<std::string>());
        if (!mode) throw ParseError("run log", 0, "unknown evidence mode");
        r.mode = *mode;
        r.evidence_text = j.value("evidence_text", "");
        r.evidence_pids = j.value("evidence_pids", std::vector<PassageId>{});
        r.gate_generated = gate_from(j.at("gate_generated"));
        r.gate_evidence = gate_from(j.at("gate_evidence"));
        r.support = gate_from(j.at("support"));
        r.verdict = enum_from(j, "verdict", kVerdictValues);
        r.evidence_empty = j.value("evidence_empty", false);
        r.evidence_truncated = j.value("evidence_truncated", false);
        r.error = j.value("error", "");
        r.exchanges = exchanges_from(j);
        return r;
    });
}

json to_json(const FactRecord& r) {
    json j = {{"schema", kSchemaVersion},
              {"kind", "fact"},
              {"qid", r.qid},
              {"index", r.index},
              {"retriever", r.retriever},
              {"statement", r.statement},
              {"combined_query", r.combined_query},
              {"evidence_pid", r.evidence_pid ? json(*r.evidence_pid) : json(nullptr)},
              {"evidence_text", r.evidence_text},
              {"verdict", to_string(r.verdict)},
              {"explanation", r.explanation},
              {"no_evidence", r.no_evidence},
              {"post_edit", r.post_edit ? json(*r.post_edit) : json(nullptr)},
              {"length_anomaly", r.length_anomaly},
              {"exchanges", exchanges_json(r.exchanges)}};
    return j;
}

FactRecord fact_from_json(const json& j) {
    check_schema(j, "fact");
    return guarded([&] {
        FactRecord r;
        r.qid = j.at("qid").get<QueryId>();
        r.index = j.at("index").get<std::size_t>();
        r.retriever = j.at("retriever").get<std::string>();
        r.statement = j.at("statement").get<std::string>();
        r.combined_query = j.value("combined_query", "");
        if (!j.at("evidence_pid").is_null()) r.evidence_pid = j.at("evidence_pid").get<PassageId>();
        r.evidence_text = j.value("evidence_text", "");
        r.verdict = enum_from(j, "verdict", kFactValues);
        r.explanation = j.value("explanation", "");
        r.no_evidence = j.value("no_evidence", false);
        if (j.contains("post_edit") && !j.at("post_edit").is_null()) r.post_edit = j.at("post_edit").get<std::string>();
        r.length_anomaly = j.value("length_anomaly", false);
        r.exchanges = exchanges_from(j);
        return r;
    });
}

json to_json(const AttributedAnswer& a) {
    json segs = json::array();
    for (const auto& s : a.segments)
        segs.push_back({{"text", s.text}, {"pid", s.pid}, {"statement_index", s.statement_index}});
    return {{"schema", kSchemaVersion},
            {"kind", "recomposed"},
            {"qid", a.qid},
            {"question", a.question},
            {"generated_answer", a.generated_answer},
            {"retriever", a.retriever},
            {"segments", segs},
            {"dropped", a.dropped},
            {"unresolved", a.unresolved},
            {"statement_count", a.statement_count},
            {"extraction_failure", a.extraction_failure},
            {"display_text", a.display_text()},
            {"error", a.error},
            {"exchanges", exchanges_json(a.exchanges)}};
}

AttributedAnswer attributed_from_json(const json& j) {
    check_schema(j, "recomposed");
    return guarded([&] {
        AttributedAnswer a;
        a.qid = j.at("qid").get<QueryId>();
        a.question = j.value("question", "");
        a.generated_answer = j.value("generated_answer", "");
        a.retriever = j.at("retriever").get<std::string>();
        for (const auto& s : j.at("segments"))
            a.segments.push_back({s.at("text").get<std::string>(), s.at("pid").get<PassageId>(),
                                  s.value("statement_index", std::size_t{0})});
        a.dropped = j.value("dropped", std::vector<std::string>{});
        a.unresolved = j.value("unresolved", std::vector<std::string>{});
        a.statement_count = j.value("statement_count", std::size_t{0});
        a.extraction_failure = j.value("extraction_failure", false);
        a.error = j.value("error", "");
        a.exchanges = exchanges_from(j);
        return a;
    });
}

}  // namespace verifact::pipeline
