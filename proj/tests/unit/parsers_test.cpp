#include <gtest/gtest.h>

#include "verifact/error.hpp"
#include "verifact/llm/parsers.hpp"

namespace verifact::llm {
namespace {

TEST(ParseYesNo, FalsePositiveGeneratedAnswerReply) {
    auto v = parse_yes_no(
        "Yes, the answer directly answers the question by acknowledging its limitations and offering an "
        "alternative solution to finding the information requested.");
    EXPECT_EQ(v.label, YesNo::Yes);
    EXPECT_EQ(v.explanation.rfind("the answer directly answers", 0), 0u) << v.explanation;
}

TEST(ParseYesNo, NoWithPeriod) {
    auto v = parse_yes_no(
        "No. The answer does not directly answer the question \"who sang delta dawn?\" Instead, it provides "
        "information about multiple artists who have recorded the song \"Delta Dawn.\"");
    EXPECT_EQ(v.label, YesNo::No);
    EXPECT_EQ(v.explanation.rfind("The answer does not", 0), 0u);
}

TEST(ParseYesNo, YesWithExplanationLabel) {
    auto v = parse_yes_no(
        "Yes.  Explanation: The evidence provided states the estimated population of Bartholomew County, "
        "Indiana as of 2015 is 81,162.");
    EXPECT_EQ(v.label, YesNo::Yes);
    EXPECT_EQ(v.explanation.rfind("Explanation: The evidence", 0), 0u);
}

TEST(ParseYesNo, DecorationAndCaseTolerated) {
    EXPECT_EQ(parse_yes_no("**YES** it does").label, YesNo::Yes);
    EXPECT_EQ(parse_yes_no("  'no' - not at all").label, YesNo::No);
    EXPECT_EQ(parse_yes_no("No").explanation, "");
}

TEST(ParseYesNo, UnlabelledRepliesThrowWithRawKept) {
    for (std::string raw : {"", "Maybe.", "The evidence supports it.", "Yesterday it was true", "Nobody knows"}) {
        try {
            parse_yes_no(raw);
            ADD_FAILURE() << "parsed: " << raw;
        } catch (const UnparseableResponse& e) {
            EXPECT_EQ(e.raw(), raw);
        }
    }
}

TEST(ParseScn, LowercaseContradictoryReply) {
    auto v = parse_scn(
        "contradictory.  the evidence provided contradicts the factual statement. the evidence discusses the "
        "salary range of forensic pathologists in the united states, which is different from the statement "
        "about dentists' earnings. therefore, the evidence is not relevant to the statement and contradicts it.");
    EXPECT_EQ(v.label, Scn::Contradictory);
    EXPECT_EQ(v.explanation.rfind("the evidence provided contradicts", 0), 0u);
}

TEST(ParseScn, AllLabels) {
    EXPECT_EQ(parse_scn("Supported. The passage says so.").label, Scn::Supported);
    EXPECT_EQ(parse_scn("Neither - unrelated passage").label, Scn::Neither);
    EXPECT_EQ(parse_scn("'Contradictory'").label, Scn::Contradictory);
    EXPECT_THROW(parse_scn("Partially supported"), UnparseableResponse);
    EXPECT_THROW(parse_scn("Yes"), UnparseableResponse);
}

TEST(ParseStatementList, BulletedStatements) {
    auto s = parse_statement_list(
        "- The song \"Rise Up\" exists.\n- There is a singer named Andra Day.\n- Andra Day performs the song "
        "\"Rise Up\".\n");
    EXPECT_EQ(s, (std::vector<std::string>{"The song \"Rise Up\" exists.", "There is a singer named Andra Day.",
                                           "Andra Day performs the song \"Rise Up\"."}));
}

TEST(ParseStatementList, MixedMarkersAndBlankLines) {
    auto s = parse_statement_list(
        "1. Washington DC is home to the Washington Monument.\n\n2) Washington DC is home to the Lincoln "
        "Memorial.\n* Washington DC is home to the Jefferson Memorial.\n\xE2\x80\xA2 Unmarked bullet.\n   \n");
    EXPECT_EQ(s, (std::vector<std::string>{"Washington DC is home to the Washington Monument.",
                                           "Washington DC is home to the Lincoln Memorial.",
                                           "Washington DC is home to the Jefferson Memorial.", "Unmarked bullet."}));
}

TEST(ParseStatementList, EmptyReplyIsEmptyList) {
    EXPECT_TRUE(parse_statement_list("").empty());
    EXPECT_TRUE(parse_statement_list("\n - \n").empty());
}

TEST(ParseStatementList, NumbersInsideStatementsKept) {
    EXPECT_EQ(parse_statement_list("- 2019 population was 83,779."),
              (std::vector<std::string>{"2019 population was 83,779."}));
}

TEST(IsNoAnswer, Detection) {
    EXPECT_TRUE(is_no_answer("No Answer"));
    EXPECT_TRUE(is_no_answer("  no answer."));
    EXPECT_FALSE(is_no_answer("No, the answer is 5"));
    EXPECT_FALSE(is_no_answer("The passage answers it."));
}

}  // namespace
}  // namespace verifact::llm
