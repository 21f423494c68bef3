#include "verifact/llm/templates.hpp"

#include <algorithm>

#include "verifact/error.hpp"

namespace verifact::llm {
namespace {

constexpr std::string_view kAnswer =
    "You are an expert in this field. Please answer the question as simply and concisely as possible.\n"
    "\n"
    "Question: {query}\n"
    "\n"
    "Answer:";

constexpr std::string_view kDirectCheck =
    "I want you to act as an assessor of the answer. You will be given a question and an answer, and you need "
    "to determine whether the answer directly answers the question. Examples of non-direct answers would be "
    "claiming it does not know or does not have enough information, and provide some alternative ways to find "
    "answers. Also note that if an answer claims that the question itself is wrong, it also is a form of direct "
    "answer. Your response should be 'Yes' if the answer actually answers the question, ad 'No' if the answer "
    "does not actually answer the question. Please also include a short and concise explanation of your "
    "classification.\n"
    "\n"
    "Question: {query}\n"
    "\n"
    "Answer: {answer}";

constexpr std::string_view kSupportCheck =
    "I want you to act as an assessor of the answer. You will be provided with a question, an answer, and "
    "relevant evidence. Your task is to assess whether the evidence provided supports the given answer. If the "
    "evidence supports the answer, reply with a 'Yes'. Otherwise, reply with a 'No'. Please also include a short "
    "and concise explanation of your classification.\n"
    "\n"
    "Question: {query}\n"
    "\n"
    "Answer: {LLM answer}\n"
    "\n"
    "Evidence: {Retrieved answer}";

constexpr std::string_view kReader =
    "I want you to act as a question-based summarizer for a set of passages. Given a question and a passage "
    "containing answer to the question, your task is to provide a clear and concise summary of the passage that "
    "directly answer the question and contain minimal extra information. Your summary should be easy to "
    "understand and accurately represent the passage. Keep in mind that your summary should be objective and "
    "avoid including personal opinions or biases. If the passage does not answer, simply reply with 'No Answer', "
    "otherwise reply with just the summary itself and nothing else.\n"
    "\n"
    "Question: {query}\n"
    "\n"
    "Passage 1: {passage1}\n"
    "\n"
    "Passage 2: {passage2}\n"
    "\n"
    "Passage 3: {passage3}";

constexpr std::string_view kFactExtract =
    "I want you to act as a language expert. Your task is given a question and a proposed answer, extract "
    "concise and relevant factual statements from the proposed answer. Include only statements that have a "
    "truth value and are worth validating, and ignore subjective claims. You should generate a bullet list of "
    "statements that are potentially true or false based on the question and proposed answer. Please only reply "
    "with the bullet list and nothing else.\n"
    "\n"
    "Question: {question}\n"
    "\n"
    "Proposed Answer: {proposed answer}";

constexpr std::string_view kFactValidate =
    "I want you to act as a language expert and assist in determining the relationship between a factual "
    "statement and a piece of evidence. Here's how you should handle it:\n"
    "If the evidence supports the statement, reply with only the word 'Supported'.\n"
    "If the evidence contradicts the statement, reply with only the word 'Contradictory'.\n"
    "If the evidence is not relevant to the statement (neither supports nor contradicts it), reply with only "
    "the word 'Neither'.\n"
    "Your response should be a simple label 'Supported', 'Contradictory', or 'Neither', followed by a short and "
    "concise explanation of your classification.\n"
    "\n"
    "Statement: {statement}\n"
    "\n"
    "Evidence: {passage}";

constexpr std::string_view kFactPostEdit =
    "I want you to act as a language expert and assist in post editing a false statement using a given piece of "
    "evidence. Your objective is to make minimal changes to the original statement while correcting it. Be "
    "concise. If the original false statement is one sentence, your corrected statement should also only be one "
    "sentence. Do not add more facts to the original statement, but only correct the wrong part of the original "
    "false statement. Please only reply with the corrected statement and nothing else.\n"
    "\n"
    "Statement: {statement}\n"
    "\n"
    "Evidence: {passage}";

const std::vector<PromptTemplate>& all_templates() {
    static const std::vector<PromptTemplate> templates = {
        {PromptKind::Answer, kAnswer, {"query"}},
        {PromptKind::DirectCheck, kDirectCheck, {"query", "answer"}},
        {PromptKind::SupportCheck, kSupportCheck, {"query", "LLM answer", "Retrieved answer"}},
        {PromptKind::Reader, kReader, {"query", "passage1", "passage2", "passage3"}},
        {PromptKind::FactExtract, kFactExtract, {"question", "proposed answer"}},
        {PromptKind::FactValidate, kFactValidate, {"statement", "passage"}},
        {PromptKind::FactPostEdit, kFactPostEdit, {"statement", "passage"}},
    };
    return templates;
}

}  // namespace

std::string_view to_string(PromptKind kind) noexcept {
    switch (kind) {
    case PromptKind::Answer: return "Answer";
    case PromptKind::DirectCheck: return "DirectCheck";
    case PromptKind::SupportCheck: return "SupportCheck";
    case PromptKind::Reader: return "Reader";
    case PromptKind::FactExtract: return "FactExtract";
    case PromptKind::FactValidate: return "FactValidate";
    case PromptKind::FactPostEdit: return "FactPostEdit";
    }
    return "?";
}

std::optional<PromptKind> prompt_kind_from_string(std::string_view name) noexcept {
    for (PromptKind k : kAllPromptKinds)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

const PromptTemplate& prompt_template(PromptKind kind) {
    return all_templates().at(static_cast<std::size_t>(kind));
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
    std::vector<std::string> missing, extra;
    for (auto name : tmpl.placeholders)
        if (bindings.find(name) == bindings.end()) missing.emplace_back(name);
    for (const auto& [key, _] : bindings)
        if (std::find(tmpl.placeholders.begin(), tmpl.placeholders.end(), key) == tmpl.placeholders.end())
            extra.push_back(key);
    if (!missing.empty() || !extra.empty()) {
        std::string msg = std::string("bad bindings for ") + std::string(to_string(tmpl.kind)) + " template:";
        for (const auto& m : missing) msg += " missing '" + m + "'";
        for (const auto& e : extra) msg += " unexpected '" + e + "'";
        throw BindingError(msg);
    }

    std::string out;
    std::string_view body = tmpl.body;
    out.reserve(body.size() + 256);
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            bool substituted = false;
            for (auto name : tmpl.placeholders) {
                if (body.compare(i + 1, name.size(), name) == 0 && i + 1 + name.size() < body.size() &&
                    body[i + 1 + name.size()] == '}') {
                    out += bindings.find(name)->second;
                    i += name.size() + 2;
                    substituted = true;
                    break;
                }
            }
            if (substituted) continue;
        }
        out.push_back(body[i++]);
    }
    return out;
}

std::optional<PromptKind> identify_template(std::string_view prompt) {
    for (const auto& t : all_templates()) {
        std::string_view head = t.body.substr(0, t.body.find('{'));
        if (prompt.substr(0, head.size()) == head) return t.kind;
    }
    return std::nullopt;
}

}  // namespace verifact::llm
