#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "verifact/corpus.hpp"
#include "verifact/llm/gateway.hpp"
#include "verifact/pipeline/records.hpp"
#include "verifact/pipeline/run_log.hpp"
#include "verifact/retrieval.hpp"

namespace verifact::pipeline {

using Trace = std::vector<llm::LlmExchange>;

/// `question + " " + text`. Throws Error when either side is empty.
std::string build_combined_query(std::string_view question, std::string_view text);

/// Cuts `text` to at most `max_bytes` without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view text, std::size_t max_bytes);

/// Asks the model to answer `question`. Throws Error for an empty question before any call.
std::string generate_answer(llm::LlmGateway& gateway, std::string_view question, Trace* trace = nullptr);

/// Does `answer` directly answer `question`? Unparseable replies come back as
/// GateStatus::Unparseable.
GateOutcome check_direct(llm::LlmGateway& gateway, std::string_view question, std::string_view answer,
                         Trace* trace = nullptr);

/// Does `evidence` support `generated`?
GateOutcome classify_support(llm::LlmGateway& gateway, std::string_view question, std::string_view generated,
                             std::string_view evidence, Trace* trace = nullptr);

/// Question-focused summary of up to three passages; one or two passages are padded by
/// repeating the last. nullopt when the model replies "No Answer". Throws Error for zero
/// or more than three passages.
std::optional<std::string> reader_extract(llm::LlmGateway& gateway, std::string_view question,
                                          std::span<const std::string> passages, Trace* trace = nullptr,
                                          std::size_t context_budget_chars = 0);

struct EvidenceSources {
    Retriever* bm25 = nullptr;
    Retriever* neural = nullptr;
    const QrelSet* qrels = nullptr;
    const Corpus* corpus = nullptr;
};

struct Evidence {
    std::string text;
    std::vector<PassageId> pids;
    bool empty() const noexcept { return text.empty(); }
};

/// Fetches evidence for one question under `mode`. An empty result (no hit, no qrel,
/// or a "No Answer" reader reply) is returned as empty evidence, not thrown.
Evidence retrieve_evidence(const EvidenceSources& sources, llm::LlmGateway& gateway, std::string_view combined_query,
                           EvidenceMode mode, const Question& question, Trace* trace = nullptr,
                           std::size_t context_budget_chars = 0);

/// The lazily evaluated steps of the stepped classification.
struct StepHooks {
    std::function<GateOutcome()> check_generated;
    std::function<bool()> fetch_evidence;  // false when evidence is empty
    std::function<GateOutcome()> check_evidence;
    std::function<GateOutcome()> check_support;
};

/// Generated-answer gate, then evidence, then evidence gate (skipped for qrels), then
/// support. Any "No" gate or empty evidence yields NotRelated without running later
/// steps; an unparseable reply at any step yields Unparseable. Fills the three gate
/// fields and `evidence_empty` of `record` and returns the verdict.
Verdict stepped_classify(VerificationRecord& record, const StepHooks& hooks);

/// Shares the generated answer and its direct-answer gate across evidence modes.
class AnswerCache {
  public:
    struct Entry {
        std::string answer;
        Trace answer_trace;
        GateOutcome gate;
        Trace gate_trace;
    };
    /// Runs `make` once per qid; later callers get the stored entry.
    Entry get_or_create(QueryId qid, const std::function<Entry()>& make);

  private:
    std::mutex mu_;
    std::map<QueryId, std::shared_ptr<Entry>> entries_;
    std::map<QueryId, std::shared_ptr<std::once_flag>> flags_;
};

struct Experiment1Config {
    EvidenceSources sources;
    std::size_t parallelism = 1;
    std::size_t context_budget_chars = 12000;  // 0 disables truncation
    AnswerCache* cache = nullptr;
};

/// Verifies every question under one evidence mode. Records stream to `log` (when
/// given) in question order; (qid, mode) pairs already in the log are skipped. A
/// failure inside one question is stored on its record with verdict Error.
std::vector<VerificationRecord> run_experiment1(const std::vector<Question>& questions, EvidenceMode mode,
                                                llm::LlmGateway& gateway, const Experiment1Config& config,
                                                RunLog* log = nullptr);

/// Upper bound on LLM calls for a run, for `--dry-run`.
std::size_t planned_calls_experiment1(std::size_t questions, std::span<const EvidenceMode> modes);

}  // namespace verifact::pipeline
