#include "verifact/pipeline/answer.hpp"

#include <algorithm>
#include <set>

#include "verifact/error.hpp"
#include "verifact/llm/parsers.hpp"

namespace verifact::pipeline {

using llm::PromptKind;

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

void record(Trace* trace, const llm::LlmExchange& ex) {
    if (trace) trace->push_back(ex);
}

GateOutcome parse_gate(llm::LlmExchange& ex) {
    try {
        auto v = llm::parse_yes_no(ex.raw_response);
        ex.parsed = std::string(llm::to_string(v.label));
        return {v.label == llm::YesNo::Yes ? GateStatus::Yes : GateStatus::No, v.explanation};
    } catch (const UnparseableResponse&) {
        ex.parsed = "Unparseable";
        return {GateStatus::Unparseable, ex.raw_response};
    }
}

// Renders `kind` with `evidence_key` tail-cut so the prompt stays within `budget` bytes.
std::string render_within(PromptKind kind, llm::Bindings bindings, const std::string& evidence_key,
                          std::size_t budget, bool* truncated) {
    std::string prompt = llm::render_prompt(kind, bindings);
    if (budget == 0 || prompt.size() <= budget) return prompt;
    std::size_t overflow = prompt.size() - budget;
    std::string& ev = bindings[evidence_key];
    ev = truncate_utf8(ev, ev.size() > overflow ? ev.size() - overflow : 0);
    if (truncated) *truncated = true;
    return llm::render_prompt(kind, bindings);
}

}  // namespace

std::string build_combined_query(std::string_view question, std::string_view text) {
    if (question.empty() || text.empty()) throw Error("combined query needs a non-empty question and text");
    std::string out;
    out.reserve(question.size() + 1 + text.size());
    out.append(question).append(" ").append(text);
    return out;
}

std::string truncate_utf8(std::string_view text, std::size_t max_bytes) {
    if (text.size() <= max_bytes) return std::string(text);
    std::size_t cut = max_bytes;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    return std::string(text.substr(0, cut));
}

std::string generate_answer(llm::LlmGateway& gateway, std::string_view question, Trace* trace) {
    if (blank(question)) throw Error("cannot answer an empty question");
    auto ex = gateway.complete(PromptKind::Answer, {{"query", std::string(question)}});
    ex.parsed = "answer";
    record(trace, ex);
    return ex.raw_response;
}

GateOutcome check_direct(llm::LlmGateway& gateway, std::string_view question, std::string_view answer, Trace* trace) {
    auto ex = gateway.complete(PromptKind::DirectCheck, {{"query", std::string(question)}, {"answer", std::string(answer)}});
    GateOutcome g = parse_gate(ex);
    record(trace, ex);
    return g;
}

namespace {

GateOutcome check_direct_budgeted(llm::LlmGateway& gateway, std::string_view question, std::string_view answer,
                                  Trace* trace, std::size_t budget, bool* truncated) {
    std::string prompt = render_within(PromptKind::DirectCheck,
                                       {{"query", std::string(question)}, {"answer", std::string(answer)}}, "answer",
                                       budget, truncated);
    auto ex = gateway.complete(PromptKind::DirectCheck, std::move(prompt));
    GateOutcome g = parse_gate(ex);
    record(trace, ex);
    return g;
}

GateOutcome classify_support_budgeted(llm::LlmGateway& gateway, std::string_view question,
                                      std::string_view generated, std::string_view evidence, Trace* trace,
                                      std::size_t budget, bool* truncated) {
    std::string prompt = render_within(PromptKind::SupportCheck,
                                       {{"query", std::string(question)},
                                        {"LLM answer", std::string(generated)},
                                        {"Retrieved answer", std::string(evidence)}},
                                       "Retrieved answer", budget, truncated);
    auto ex = gateway.complete(PromptKind::SupportCheck, std::move(prompt));
    GateOutcome g = parse_gate(ex);
    record(trace, ex);
    return g;
}

}  // namespace

GateOutcome classify_support(llm::LlmGateway& gateway, std::string_view question, std::string_view generated,
                             std::string_view evidence, Trace* trace) {
    return classify_support_budgeted(gateway, question, generated, evidence, trace, 0, nullptr);
}

std::optional<std::string> reader_extract(llm::LlmGateway& gateway, std::string_view question,
                                          std::span<const std::string> passages, Trace* trace,
                                          std::size_t context_budget_chars) {
    if (passages.empty() || passages.size() > 3)
        throw Error("reader needs one to three passages, got " + std::to_string(passages.size()));
    std::vector<std::string> slots(passages.begin(), passages.end());
    while (slots.size() < 3) slots.push_back(slots.back());

    llm::Bindings b = {{"query", std::string(question)},
                       {"passage1", slots[0]},
                       {"passage2", slots[1]},
                       {"passage3", slots[2]}};
    std::string prompt = llm::render_prompt(PromptKind::Reader, b);
    if (context_budget_chars > 0 && prompt.size() > context_budget_chars) {
        std::size_t overflow = prompt.size() - context_budget_chars;
        for (const char* key : {"passage3", "passage2", "passage1"}) {
            std::string& p = b[key];
            std::size_t cut = std::min(overflow, p.size());
            p = truncate_utf8(p, p.size() - cut);
            overflow -= std::min(overflow, cut);
            if (overflow == 0) break;
        }
        prompt = llm::render_prompt(PromptKind::Reader, b);
    }
    auto ex = gateway.complete(PromptKind::Reader, std::move(prompt));
    bool none = llm::is_no_answer(ex.raw_response) || blank(ex.raw_response);
    ex.parsed = none ? "NoAnswer" : "summary";
    record(trace, ex);
    if (none) return std::nullopt;
    return ex.raw_response;
}

Evidence retrieve_evidence(const EvidenceSources& sources, llm::LlmGateway& gateway, std::string_view combined_query,
                           EvidenceMode mode, const Question& question, Trace* trace,
                           std::size_t context_budget_chars) {
    Evidence ev;
    auto require = [](Retriever* r, const char* what) -> Retriever& {
        if (!r) throw ConfigError(std::string(what) + " retriever not configured");
        return *r;
    };
    switch (mode) {
    case EvidenceMode::Bm25Top1:
    case EvidenceMode::NeuralTop1: {
        Retriever& r = mode == EvidenceMode::Bm25Top1 ? require(sources.bm25, "bm25") : require(sources.neural, "neural");
        auto hits = r.retrieve(combined_query, 1);
        if (!hits.empty()) {
            ev.text = hits.front().text;
            ev.pids.push_back(hits.front().pid);
        }
        break;
    }
    case EvidenceMode::ReaderTop3: {
        auto hits = require(sources.neural, "neural").retrieve(combined_query, 3);
        if (hits.empty()) break;
        std::vector<std::string> texts;
        for (auto& h : hits) {
            ev.pids.push_back(h.pid);
            texts.push_back(std::move(h.text));
        }
        if (auto summary = reader_extract(gateway, question.text, texts, trace, context_budget_chars))
            ev.text = std::move(*summary);
        break;
    }
    case EvidenceMode::Qrel: {
        if (!sources.qrels || !sources.corpus) throw ConfigError("qrel mode needs qrels and the collection");
        const auto* judged = sources.qrels->find(question.qid);
        if (!judged || judged->empty()) break;
        PassageId pid = judged->front();
        auto passage = sources.corpus->find(pid);
        if (!passage) throw NotFoundError("qrel passage " + std::to_string(pid) + " not in collection");
        ev.text = std::string(passage->text);
        ev.pids.push_back(pid);
        break;
    }
    }
    return ev;
}

Verdict stepped_classify(VerificationRecord& rec, const StepHooks& hooks) {
    rec.gate_generated = hooks.check_generated();
    if (rec.gate_generated.status == GateStatus::Unparseable) return Verdict::Unparseable;
    if (rec.gate_generated.status == GateStatus::No) return Verdict::NotRelated;

    if (!hooks.fetch_evidence()) {
        rec.evidence_empty = true;
        return Verdict::NotRelated;
    }

    if (rec.mode == EvidenceMode::Qrel) {
        rec.gate_evidence = {GateStatus::Skipped, "qrel passages are assumed to address the question"};
    } else {
        rec.gate_evidence = hooks.check_evidence();
        if (rec.gate_evidence.status == GateStatus::Unparseable) return Verdict::Unparseable;
        if (rec.gate_evidence.status == GateStatus::No) return Verdict::NotRelated;
    }

    rec.support = hooks.check_support();
    switch (rec.support.status) {
    case GateStatus::Yes: return Verdict::Yes;
    case GateStatus::No: return Verdict::No;
    default: return Verdict::Unparseable;
    }
}

AnswerCache::Entry AnswerCache::get_or_create(QueryId qid, const std::function<Entry()>& make) {
    std::shared_ptr<std::once_flag> flag;
    {
        std::lock_guard lock(mu_);
        auto& f = flags_[qid];
        if (!f) f = std::make_shared<std::once_flag>();
        flag = f;
    }
    std::call_once(*flag, [&] {
        auto entry = std::make_shared<Entry>(make());
        std::lock_guard lock(mu_);
        entries_[qid] = std::move(entry);
    });
    std::lock_guard lock(mu_);
    return *entries_.at(qid);
}

namespace {

VerificationRecord verify_one(const Question& q, EvidenceMode mode, llm::LlmGateway& gateway,
                              const Experiment1Config& config) {
    VerificationRecord rec;
    rec.qid = q.qid;
    rec.question = q.text;
    rec.mode = mode;
    try {
        auto make = [&] {
            AnswerCache::Entry e;
            e.answer = generate_answer(gateway, q.text, &e.answer_trace);
            e.gate = check_direct(gateway, q.text, e.answer, &e.gate_trace);
            return e;
        };
        AnswerCache::Entry entry = config.cache ? config.cache->get_or_create(q.qid, make) : make();
        rec.generated_answer = entry.answer;
        rec.exchanges = entry.answer_trace;
        if (!blank(entry.answer)) rec.combined_query = build_combined_query(q.text, entry.answer);

        StepHooks hooks;
        hooks.check_generated = [&] {
            rec.exchanges.insert(rec.exchanges.end(), entry.gate_trace.begin(), entry.gate_trace.end());
            return entry.gate;
        };
        hooks.fetch_evidence = [&] {
            if (rec.combined_query.empty()) return false;
            Evidence ev = retrieve_evidence(config.sources, gateway, rec.combined_query, mode, q, &rec.exchanges,
                                            config.context_budget_chars);
            rec.evidence_text = std::move(ev.text);
            rec.evidence_pids = std::move(ev.pids);
            return !rec.evidence_text.empty();
        };
        hooks.check_evidence = [&] {
            return check_direct_budgeted(gateway, q.text, rec.evidence_text, &rec.exchanges,
                                         config.context_budget_chars, &rec.evidence_truncated);
        };
        hooks.check_support = [&] {
            return classify_support_budgeted(gateway, q.text, rec.generated_answer, rec.evidence_text, &rec.exchanges,
                                             config.context_budget_chars, &rec.evidence_truncated);
        };
        rec.verdict = stepped_classify(rec, hooks);
    } catch (const std::exception& e) {
        rec.verdict = Verdict::Error;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

std::vector<VerificationRecord> run_experiment1(const std::vector<Question>& questions, EvidenceMode mode,
                                                llm::LlmGateway& gateway, const Experiment1Config& config,
                                                RunLog* log) {
    std::set<QueryId> done;
    if (log) {
        for (const auto& r : read_run_log(log->path()).verifications)
            if (r.mode == mode) done.insert(r.qid);
    }
    std::vector<const Question*> todo;
    for (const auto& q : questions)
        if (!done.count(q.qid)) todo.push_back(&q);

    std::vector<VerificationRecord> out;
    out.reserve(todo.size());
    run_ordered<VerificationRecord>(
        todo.size(), config.parallelism,
        [&](std::size_t i) { return verify_one(*todo[i], mode, gateway, config); },
        [&](std::size_t, VerificationRecord&& r) {
            if (log) log->append(to_json(r));
            out.push_back(std::move(r));
        });
    return out;
}

std::size_t planned_calls_experiment1(std::size_t questions, std::span<const EvidenceMode> modes) {
    std::size_t per_question = 2;  // answer + generated-answer gate, shared across modes
    for (EvidenceMode m : modes) {
        if (m == EvidenceMode::ReaderTop3) per_question += 1;
        if (m != EvidenceMode::Qrel) per_question += 1;
        per_question += 1;
    }
    return questions * per_question;
}

}  // namespace verifact::pipeline
