#include <gtest/gtest.h>

#include "test_support.hpp"
#include "verifact/error.hpp"
#include "verifact/pipeline/facts.hpp"

namespace verifact::pipeline {
namespace {

using llm::PromptKind;
using llm::Scn;
using testing::FakeRetriever;
using testing::field_after;
using testing::ScriptedLlm;

std::string first_word(const std::string& s) { return s.substr(0, s.find(' ')); }

// Answers are "s1; s2; s3"; extraction splits on "; "; validation compares the
// statement with the evidence; post-editing copies the evidence.
std::shared_ptr<ScriptedLlm> honest_llm(std::map<std::string, std::string> answers) {
    auto llm = std::make_shared<ScriptedLlm>();
    llm->on(PromptKind::Answer, [answers](const std::string& p) {
        auto it = answers.find(field_after(p, "Question: "));
        return it == answers.end() ? std::string("I don't know.") : it->second;
    });
    llm->on(PromptKind::FactExtract, [](const std::string& p) {
        auto answer = field_after(p, "Proposed Answer: ");
        std::string out;
        std::size_t start = 0;
        while (start <= answer.size()) {
            auto end = answer.find("; ", start);
            out += "- " + answer.substr(start, end == std::string::npos ? std::string::npos : end - start) + "\n";
            if (end == std::string::npos) break;
            start = end + 2;
        }
        return out;
    });
    llm->on(PromptKind::FactValidate, [](const std::string& p) -> std::string {
        auto statement = field_after(p, "Statement: ");
        auto evidence = field_after(p, "Evidence: ");
        if (evidence.find(statement) != std::string::npos) return "Supported. The evidence states it.";
        if (first_word(evidence) == first_word(statement)) return "Contradictory. The evidence disagrees.";
        return "Neither. Unrelated passage.";
    });
    llm->on(PromptKind::FactPostEdit, [](const std::string& p) { return field_after(p, "Evidence: "); });
    return llm;
}

TEST(ExtractFacts, BulletListAndEmpty) {
    auto llm = std::make_shared<ScriptedLlm>();
    std::string reply =
        "- The song \"Rise Up\" exists.\n- There is a singer named Andra Day.\n- Andra Day performs the song \"Rise "
        "Up\".";
    llm->on(PromptKind::FactExtract, [&](const std::string&) { return reply; });
    auto gw = testing::make_gateway(llm);
    auto facts = extract_facts(gw, "who sings the song rise up", "Andra Day sings the song \"Rise Up\".");
    EXPECT_EQ(facts, (std::vector<std::string>{"The song \"Rise Up\" exists.", "There is a singer named Andra Day.",
                                               "Andra Day performs the song \"Rise Up\"."}));
    reply = "";
    EXPECT_TRUE(extract_facts(gw, "q", "a").empty());
    EXPECT_THROW(extract_facts(gw, "q", ""), Error);
}

TEST(RetrieveForStatement, CombinedQueryAndTop1) {
    FakeRetriever r("bm25");
    r.fallback({{4, "first", 2.0, {}}, {5, "second", 1.0, {}}});
    auto hit = retrieve_for_statement(r, "who?", "Andra Day sings.");
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->pid, 4);
    EXPECT_EQ(r.queries(), (std::vector<std::string>{"who? Andra Day sings."}));
    FakeRetriever empty;
    EXPECT_FALSE(retrieve_for_statement(empty, "q", "s"));
    EXPECT_THROW(retrieve_for_statement(r, "q", ""), Error);
}

TEST(RetrieveForStatement, RareTermPassageWinsUnderBm25) {
    auto corpus = Corpus::from_pairs({{1, "the cat sat"}, {2, "the dog sat near zanzibar"}, {3, "the bird flew"}});
    auto index = build_index(corpus);
    Bm25Retriever r(index, corpus);
    auto hit = retrieve_for_statement(r, "where", "zanzibar");
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->pid, 2);
}

TEST(ValidateFact, LabelsAndUnparseable) {
    auto llm = std::make_shared<ScriptedLlm>();
    std::string reply =
        "Contradictory. The evidence is not relevant to the statement and contradicts it by stating the salary of a "
        "forensic pathologist.";
    llm->on(PromptKind::FactValidate, [&](const std::string&) { return reply; });
    auto gw = testing::make_gateway(llm);
    EXPECT_EQ(validate_fact(gw, "A dentist earns $150,000.", "Forensic pathologists earn...").label,
              Scn::Contradictory);
    reply = "Supported";
    EXPECT_EQ(validate_fact(gw, "s", "p").label, Scn::Supported);
    reply = "Maybe.";
    Trace trace;
    EXPECT_THROW(validate_fact(gw, "s", "p", &trace), UnparseableResponse);
    ASSERT_EQ(trace.size(), 1u);
    EXPECT_EQ(trace[0].raw_response, "Maybe.");
}

TEST(PostEdit, VerbatimReplyAndLengthAnomaly) {
    auto llm = std::make_shared<ScriptedLlm>();
    std::string reply;
    llm->on(PromptKind::FactPostEdit, [&](const std::string& p) {
        return reply.empty() ? field_after(p, "Statement: ") : reply;
    });
    auto gw = testing::make_gateway(llm);
    auto same = post_edit(gw, "X is 5.", "X is 7.");
    EXPECT_EQ(same.text, "X is 5.");
    EXPECT_FALSE(same.length_anomaly);
    reply = "X is 7.";
    EXPECT_EQ(post_edit(gw, "X is 5.", "X is 7.").text, "X is 7.");
    reply = "X is 7. It was measured in 2010.";
    auto two = post_edit(gw, "X is 5.", "X is 7.");
    EXPECT_EQ(two.text, reply);
    EXPECT_TRUE(two.length_anomaly);
}

TEST(CountSentences, Basic) {
    EXPECT_EQ(count_sentences(""), 0u);
    EXPECT_EQ(count_sentences("One."), 1u);
    EXPECT_EQ(count_sentences("No terminal punctuation"), 1u);
    EXPECT_EQ(count_sentences("One. Two! Three?"), 3u);
    EXPECT_EQ(count_sentences("It costs $2.50 today."), 1u);
}

FactRecord fact(std::size_t index, FactStatus v, std::string statement, std::optional<std::string> edit = {}) {
    FactRecord f;
    f.qid = 1;
    f.index = index;
    f.statement = std::move(statement);
    f.verdict = v;
    f.evidence_pid = 100 + static_cast<PassageId>(index);
    f.post_edit = std::move(edit);
    return f;
}

TEST(Recompose, RuleApplication) {
    Question q{1, "q"};
    auto a = recompose(q, "gen", "bm25",
                       {fact(2, FactStatus::Neither, "s3"), fact(0, FactStatus::Supported, "s1"),
                        fact(1, FactStatus::Contradictory, "s2", "P")});
    EXPECT_EQ(a.segments, (std::vector<Segment>{{"s1", 100, 0}, {"P", 101, 1}}));
    EXPECT_EQ(a.dropped, (std::vector<std::string>{"s3"}));
    EXPECT_EQ(a.display_text(), "s1 P");
    EXPECT_EQ(a.statement_count, 3u);
    EXPECT_FALSE(a.extraction_failure);
}

TEST(Recompose, AllSupportedAllNeitherAndEmpty) {
    Question q{1, "q"};
    auto sup = recompose(q, "gen", "bm25", {fact(0, FactStatus::Supported, "a"), fact(1, FactStatus::Supported, "b")});
    EXPECT_EQ(sup.display_text(), "a b");
    EXPECT_TRUE(sup.dropped.empty());
    auto nei = recompose(q, "gen", "bm25", {fact(0, FactStatus::Neither, "a"), fact(1, FactStatus::Neither, "b")});
    EXPECT_TRUE(nei.segments.empty());
    EXPECT_EQ(nei.dropped, (std::vector<std::string>{"a", "b"}));
    auto none = recompose(q, "gen", "bm25", {});
    EXPECT_TRUE(none.extraction_failure);
    EXPECT_TRUE(none.segments.empty());
    auto unp = recompose(q, "gen", "bm25", {fact(0, FactStatus::Unparseable, "a")});
    EXPECT_EQ(unp.unresolved, (std::vector<std::string>{"a"}));
}

TEST(ProcessQuestionFacts, NoEvidenceForcesNeitherWithoutValidation) {
    auto llm = honest_llm({{"q", "A is 1; B is 2"}});
    FakeRetriever empty("bm25");
    auto gw = testing::make_gateway(llm);
    auto r = process_question_facts({1, "q"}, empty, gw);
    ASSERT_EQ(r.facts.size(), 2u);
    for (const auto& f : r.facts) {
        EXPECT_EQ(f.verdict, FactStatus::Neither);
        EXPECT_TRUE(f.no_evidence);
        EXPECT_FALSE(f.evidence_pid);
    }
    EXPECT_EQ(llm->calls(PromptKind::FactValidate), 0);
    EXPECT_EQ(r.answer.dropped.size(), 2u);
}

TEST(ProcessQuestionFacts, ContradictedStatementIsPostEditedOnce) {
    auto llm = honest_llm({{"q", "X is 5; Y is red"}});
    FakeRetriever r("bm25");
    r.by_function([](std::string_view query) -> std::vector<RetrievedPassage> {
        if (query.find("X is") != std::string_view::npos) return {{7, "X is 7", 1.0, {}}};
        return {{8, "Y is red and round", 1.0, {}}};
    });
    auto gw = testing::make_gateway(llm);
    auto out = process_question_facts({1, "q"}, r, gw);
    ASSERT_EQ(out.facts.size(), 2u);
    EXPECT_EQ(out.facts[0].verdict, FactStatus::Contradictory);
    EXPECT_EQ(out.facts[0].post_edit, "X is 7");
    EXPECT_EQ(out.facts[0].combined_query, "q X is 5");
    EXPECT_EQ(out.facts[1].verdict, FactStatus::Supported);
    EXPECT_FALSE(out.facts[1].post_edit);
    EXPECT_EQ(llm->calls(PromptKind::FactPostEdit), 1);
    EXPECT_EQ(out.answer.segments, (std::vector<Segment>{{"X is 7", 7, 0}, {"Y is red", 8, 1}}));
}

TEST(RunExperiment2, TwoQuestionsThreeStatementsEach) {
    testing::TempDir dir;
    auto llm = honest_llm({{"q1", "A is 1; B is 2; C is 3"}, {"q2", "D is 4; E is 5; F is 6"}});
    FakeRetriever r("neural");
    r.fallback({{3, "D is 9 and A is 1", 1.0, {}}});
    auto gw = testing::make_gateway(llm);
    RunLog log(dir / "facts.jsonl");
    auto out = run_experiment2({{1, "q1"}, {2, "q2"}}, r, gw, {}, &log);
    ASSERT_EQ(out.size(), 2u);
    auto contents = read_run_log(dir / "facts.jsonl");
    EXPECT_EQ(contents.facts.size(), 6u);
    EXPECT_EQ(contents.answers.size(), 2u);
    EXPECT_EQ(contents.facts[0].verdict, FactStatus::Supported);
    EXPECT_EQ(contents.facts[3].verdict, FactStatus::Contradictory);
    EXPECT_EQ(contents.facts[4].verdict, FactStatus::Neither);
    for (const auto& a : contents.answers) EXPECT_EQ(a.segments.size() + a.dropped.size(), 3u);
}

TEST(RunExperiment2, ZeroStatementsGivesFlaggedEmptyAnswer) {
    testing::TempDir dir;
    auto llm = honest_llm({{"q1", "A is 1"}, {"q2", "B is 2"}});
    llm->on(PromptKind::FactExtract, [](const std::string& p) -> std::string {
        return field_after(p, "Question: ") == "q2" ? "" : "- A is 1";
    });
    FakeRetriever r("bm25");
    r.fallback({{3, "A is 1", 1.0, {}}});
    auto gw = testing::make_gateway(llm);
    RunLog log(dir / "facts.jsonl");
    run_experiment2({{1, "q1"}, {2, "q2"}}, r, gw, {}, &log);
    auto contents = read_run_log(dir / "facts.jsonl");
    ASSERT_EQ(contents.facts.size(), 1u);
    EXPECT_EQ(contents.facts[0].qid, 1);
    ASSERT_EQ(contents.answers.size(), 2u);
    EXPECT_TRUE(contents.answers[1].extraction_failure);
    EXPECT_TRUE(contents.answers[1].segments.empty());
}

TEST(RunExperiment2, ErrorIsolationAndResume) {
    testing::TempDir dir;
    auto llm = honest_llm({{"q1", "A is 1"}, {"q2", "B is 2"}, {"q3", "C is 3"}});
    FakeRetriever r("bm25");
    bool fail = true;
    r.by_function([&](std::string_view q) -> std::vector<RetrievedPassage> {
        if (fail && q.find("q2") != std::string_view::npos) throw TransportError(503, "unavailable");
        return {{1, std::string(q.substr(3)), 1.0, {}}};
    });
    auto gw = testing::make_gateway(llm);
    {
        RunLog log(dir / "facts.jsonl");
        auto out = run_experiment2({{1, "q1"}, {2, "q2"}, {3, "q3"}}, r, gw, {}, &log);
        ASSERT_EQ(out.size(), 3u);
        EXPECT_TRUE(out[1].facts.empty());
        EXPECT_NE(out[1].answer.error.find("unavailable"), std::string::npos);
        EXPECT_EQ(out[2].facts.size(), 1u);
    }
    RunLog log(dir / "facts.jsonl");
    auto again = run_experiment2({{1, "q1"}, {2, "q2"}, {3, "q3"}}, r, gw, {}, &log);
    EXPECT_TRUE(again.empty());
}

}  // namespace
}  // namespace verifact::pipeline
