#include "verifact/pipeline/facts.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "verifact/error.hpp"

namespace verifact::pipeline {

using llm::PromptKind;

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

FactStatus to_fact_status(llm::Scn s) {
    switch (s) {
    case llm::Scn::Supported: return FactStatus::Supported;
    case llm::Scn::Contradictory: return FactStatus::Contradictory;
    default: return FactStatus::Neither;
    }
}

}  // namespace

std::vector<std::string> extract_facts(llm::LlmGateway& gateway, std::string_view question, std::string_view answer,
                                       Trace* trace) {
    if (blank(answer)) throw Error("cannot extract statements from an empty answer");
    auto ex = gateway.complete(PromptKind::FactExtract,
                               {{"question", std::string(question)}, {"proposed answer", std::string(answer)}});
    auto statements = llm::parse_statement_list(ex.raw_response);
    ex.parsed = std::to_string(statements.size()) + " statements";
    if (trace) trace->push_back(std::move(ex));
    return statements;
}

std::optional<RetrievedPassage> retrieve_for_statement(Retriever& retriever, std::string_view question,
                                                       std::string_view statement) {
    if (blank(statement)) throw Error("cannot retrieve for an empty statement");
    auto hits = retriever.retrieve(build_combined_query(question, statement), 1);
    if (hits.empty()) return std::nullopt;
    return std::move(hits.front());
}

llm::ScnVerdict validate_fact(llm::LlmGateway& gateway, std::string_view statement, std::string_view passage,
                              Trace* trace) {
    if (blank(statement) || blank(passage)) throw Error("validation needs a statement and a passage");
    auto ex = gateway.complete(PromptKind::FactValidate,
                               {{"statement", std::string(statement)}, {"passage", std::string(passage)}});
    try {
        auto v = llm::parse_scn(ex.raw_response);
        ex.parsed = std::string(llm::to_string(v.label));
        if (trace) trace->push_back(std::move(ex));
        return v;
    } catch (const UnparseableResponse&) {
        ex.parsed = "Unparseable";
        if (trace) trace->push_back(std::move(ex));
        throw;
    }
}

std::size_t count_sentences(std::string_view text) {
    std::size_t n = 0;
    bool in_sentence = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            bool boundary = i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]));
            if (boundary && in_sentence) {
                ++n;
                in_sentence = false;
            }
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            in_sentence = true;
        }
    }
    return n + (in_sentence ? 1 : 0);
}

PostEdit post_edit(llm::LlmGateway& gateway, std::string_view statement, std::string_view passage, Trace* trace) {
    auto ex = gateway.complete(PromptKind::FactPostEdit,
                               {{"statement", std::string(statement)}, {"passage", std::string(passage)}});
    PostEdit out;
    out.text = ex.raw_response;
    auto first = out.text.find_first_not_of(" \t\r\n");
    auto last = out.text.find_last_not_of(" \t\r\n");
    out.text = first == std::string::npos ? std::string() : out.text.substr(first, last - first + 1);
    out.length_anomaly = count_sentences(out.text) > 1;
    ex.parsed = out.length_anomaly ? "edit (length anomaly)" : "edit";
    if (trace) trace->push_back(std::move(ex));
    return out;
}

AttributedAnswer recompose(const Question& question, std::string_view generated_answer, std::string_view retriever,
                           std::vector<FactRecord> facts) {
    std::sort(facts.begin(), facts.end(), [](const FactRecord& a, const FactRecord& b) { return a.index < b.index; });
    AttributedAnswer out;
    out.qid = question.qid;
    out.question = question.text;
    out.generated_answer = std::string(generated_answer);
    out.retriever = std::string(retriever);
    out.statement_count = facts.size();
    out.extraction_failure = facts.empty();
    for (const auto& f : facts) {
        if (f.qid != question.qid) throw Error("fact record for qid " + std::to_string(f.qid) + " passed with qid " +
                                               std::to_string(question.qid));
        switch (f.verdict) {
        case FactStatus::Supported:
            out.segments.push_back({f.statement, f.evidence_pid.value(), f.index});
            break;
        case FactStatus::Contradictory:
            out.segments.push_back({f.post_edit.value_or(f.statement), f.evidence_pid.value(), f.index});
            break;
        case FactStatus::Neither: out.dropped.push_back(f.statement); break;
        case FactStatus::Unparseable: out.unresolved.push_back(f.statement); break;
        }
    }
    return out;
}

QuestionFacts process_question_facts(const Question& question, Retriever& retriever, llm::LlmGateway& gateway) {
    QuestionFacts out;
    std::string answer;
    Trace trace;
    try {
        answer = generate_answer(gateway, question.text, &trace);
        std::vector<std::string> statements;
        if (!blank(answer)) statements = extract_facts(gateway, question.text, answer, &trace);

        std::vector<FactRecord> facts;
        for (std::size_t i = 0; i < statements.size(); ++i) {
            FactRecord f;
            f.qid = question.qid;
            f.index = i;
            f.retriever = retriever.name();
            f.statement = statements[i];
            f.combined_query = build_combined_query(question.text, f.statement);
            auto hit = retrieve_for_statement(retriever, question.text, f.statement);
            if (!hit || blank(hit->text)) {
                f.verdict = FactStatus::Neither;
                f.no_evidence = true;
                f.explanation = "no passage retrieved";
                facts.push_back(std::move(f));
                continue;
            }
            f.evidence_pid = hit->pid;
            f.evidence_text = hit->text;
            try {
                auto v = validate_fact(gateway, f.statement, f.evidence_text, &f.exchanges);
                f.verdict = to_fact_status(v.label);
                f.explanation = v.explanation;
            } catch (const UnparseableResponse& e) {
                f.verdict = FactStatus::Unparseable;
                f.explanation = e.raw();
            }
            if (f.verdict == FactStatus::Contradictory) {
                auto edit = post_edit(gateway, f.statement, f.evidence_text, &f.exchanges);
                f.post_edit = std::move(edit.text);
                f.length_anomaly = edit.length_anomaly;
            }
            facts.push_back(std::move(f));
        }
        out.answer = recompose(question, answer, retriever.name(), facts);
        out.answer.exchanges = std::move(trace);
        out.facts = std::move(facts);
    } catch (const std::exception& e) {
        out.facts.clear();
        out.answer = AttributedAnswer{};
        out.answer.qid = question.qid;
        out.answer.question = question.text;
        out.answer.generated_answer = answer;
        out.answer.retriever = retriever.name();
        out.answer.error = e.what();
        out.answer.exchanges = std::move(trace);
    }
    return out;
}

std::vector<QuestionFacts> run_experiment2(const std::vector<Question>& questions, Retriever& retriever,
                                           llm::LlmGateway& gateway, const Experiment2Config& config, RunLog* log) {
    std::set<QueryId> done;
    if (log) {
        for (const auto& a : read_run_log(log->path()).answers)
            if (a.retriever == retriever.name()) done.insert(a.qid);
    }
    std::vector<const Question*> todo;
    for (const auto& q : questions)
        if (!done.count(q.qid)) todo.push_back(&q);

    std::vector<QuestionFacts> out;
    out.reserve(todo.size());
    run_ordered<QuestionFacts>(
        todo.size(), config.parallelism,
        [&](std::size_t i) { return process_question_facts(*todo[i], retriever, gateway); },
        [&](std::size_t, QuestionFacts&& r) {
            if (log) {
                std::vector<nlohmann::json> lines;
                for (const auto& f : r.facts) lines.push_back(to_json(f));
                lines.push_back(to_json(r.answer));
                log->append(lines);
            }
            out.push_back(std::move(r));
        });
    return out;
}

}  // namespace verifact::pipeline
