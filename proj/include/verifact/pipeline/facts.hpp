#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "verifact/llm/gateway.hpp"
#include "verifact/llm/parsers.hpp"
#include "verifact/pipeline/answer.hpp"
#include "verifact/pipeline/records.hpp"
#include "verifact/pipeline/run_log.hpp"
#include "verifact/retrieval.hpp"

namespace verifact::pipeline {

/// Splits `answer` into factual statements. An empty list is a legal outcome.
std::vector<std::string> extract_facts(llm::LlmGateway& gateway, std::string_view question, std::string_view answer,
                                       Trace* trace = nullptr);

/// Top-1 passage for `question + " " + statement`; nullopt when nothing matches.
std::optional<RetrievedPassage> retrieve_for_statement(Retriever& retriever, std::string_view question,
                                                       std::string_view statement);

/// Throws UnparseableResponse when the reply has no leading label.
llm::ScnVerdict validate_fact(llm::LlmGateway& gateway, std::string_view statement, std::string_view passage,
                              Trace* trace = nullptr);

struct PostEdit {
    std::string text;
    bool length_anomaly = false;  // reply has more than one sentence
};

PostEdit post_edit(llm::LlmGateway& gateway, std::string_view statement, std::string_view passage,
                   Trace* trace = nullptr);

std::size_t count_sentences(std::string_view text);

/// Builds the attributed answer from one question's fact records, in index order.
AttributedAnswer recompose(const Question& question, std::string_view generated_answer, std::string_view retriever,
                           std::vector<FactRecord> facts);

struct QuestionFacts {
    std::vector<FactRecord> facts;
    AttributedAnswer answer;
};

/// Runs the whole statement pipeline for one question. Failures are stored on
/// `answer.error` and leave `facts` empty.
QuestionFacts process_question_facts(const Question& question, Retriever& retriever, llm::LlmGateway& gateway);

struct Experiment2Config {
    std::size_t parallelism = 1;
};

/// Streams fact and recomposed lines to `log` per question, in question order.
/// Questions that already have a recomposed line are skipped.
std::vector<QuestionFacts> run_experiment2(const std::vector<Question>& questions, Retriever& retriever,
                                           llm::LlmGateway& gateway, const Experiment2Config& config,
                                           RunLog* log = nullptr);

}  // namespace verifact::pipeline
