#include <gtest/gtest.h>

#include "test_support.hpp"
#include "verifact/corpus.hpp"
#include "verifact/error.hpp"

namespace verifact {
namespace {

using testing::TempDir;
using testing::write_text;

TEST(LoadCollection, CountsPassagesAndAverageLength) {
    TempDir dir;
    write_text(dir / "c.tsv", "0\thello world\n1\tfoo\n");
    Corpus c = load_collection(dir / "c.tsv");
    EXPECT_EQ(c.doc_count(), 2u);
    EXPECT_DOUBLE_EQ(c.avg_doc_len(), 1.5);
    EXPECT_EQ(c.at(0).text, "hello world");
    ASSERT_TRUE(c.find(1));
    EXPECT_EQ(c.find(1)->text, "foo");
    EXPECT_FALSE(c.find(2));
}

TEST(LoadCollection, EmptyFileIsEmptyCorpus) {
    TempDir dir;
    write_text(dir / "c.tsv", "");
    Corpus c = load_collection(dir / "c.tsv");
    EXPECT_EQ(c.doc_count(), 0u);
    EXPECT_EQ(c.avg_doc_len(), 0.0);
}

TEST(LoadCollection, CrlfAndBlankLinesTolerated) {
    TempDir dir;
    write_text(dir / "c.tsv", "5\tfirst passage\r\n\n9\tsecond\r\n");
    Corpus c = load_collection(dir / "c.tsv");
    ASSERT_EQ(c.doc_count(), 2u);
    EXPECT_EQ(c.find(5)->text, "first passage");
    EXPECT_EQ(c.find(9)->text, "second");
}

TEST(LoadCollection, MissingTabReportsLine) {
    TempDir dir;
    write_text(dir / "c.tsv", "0\tok\n1 no tab here\n");
    try {
        load_collection(dir / "c.tsv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(LoadCollection, NonIntegerIdAndBlankTextRejected) {
    TempDir dir;
    write_text(dir / "a.tsv", "x1\ttext\n");
    EXPECT_THROW(load_collection(dir / "a.tsv"), ParseError);
    write_text(dir / "b.tsv", "1\t   \n");
    EXPECT_THROW(load_collection(dir / "b.tsv"), ParseError);
}

TEST(LoadCollection, DuplicateIdRejected) {
    TempDir dir;
    write_text(dir / "c.tsv", "1\ta\n2\tb\n1\tc\n");
    try {
        load_collection(dir / "c.tsv");
        FAIL() << "expected DuplicateKeyError";
    } catch (const DuplicateKeyError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find('1'), std::string::npos);
        EXPECT_NE(msg.find('3'), std::string::npos) << msg;
    }
}

TEST(LoadCollection, MissingFileNamesPath) {
    try {
        load_collection("/nonexistent/collection.tsv");
        FAIL();
    } catch (const NotFoundError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/collection.tsv"), std::string::npos);
    }
}

TEST(LoadCollection, WriteThenReadRoundTrips) {
    TempDir dir;
    Corpus a = Corpus::from_pairs({{3, "three"}, {1, "one two"}});
    write_collection(a, dir / "c.tsv");
    Corpus b = load_collection(dir / "c.tsv");
    ASSERT_EQ(b.doc_count(), 2u);
    EXPECT_EQ(b.at(0).id, 3);
    EXPECT_EQ(b.at(1).text, "one two");
    EXPECT_EQ(b.id_order(), (std::vector<std::uint32_t>{1, 0}));
}

TEST(LoadQueries, SplitsAtFirstTabOnly) {
    TempDir dir;
    write_text(dir / "q.tsv", "1102432\thow long does a sprained wrist take to heal\n7\ta\tb\tc\n");
    auto qs = load_queries(dir / "q.tsv");
    ASSERT_EQ(qs.size(), 2u);
    EXPECT_EQ(qs[0], (Question{1102432, "how long does a sprained wrist take to heal"}));
    EXPECT_EQ(qs[1].text, "a\tb\tc");
}

TEST(LoadQueries, DuplicateQidRejected) {
    TempDir dir;
    write_text(dir / "q.tsv", "1\ta\n1\tb\n");
    EXPECT_THROW(load_queries(dir / "q.tsv"), DuplicateKeyError);
}

TEST(LoadQrels, GroupsInFileOrderAndDropsNonRelevant) {
    TempDir dir;
    write_text(dir / "r.tsv", "3 0 7 1\n3 0 9 1\n3 0 7 1\n4\t0\t1\t0\n");
    QrelSet q = load_qrels(dir / "r.tsv");
    ASSERT_NE(q.find(3), nullptr);
    EXPECT_EQ(*q.find(3), (std::vector<PassageId>{7, 9}));
    EXPECT_EQ(q.find(4), nullptr);
}

TEST(LoadQrels, EmptyAndMalformed) {
    TempDir dir;
    write_text(dir / "e.tsv", "");
    EXPECT_TRUE(load_qrels(dir / "e.tsv").empty());
    write_text(dir / "m.tsv", "3 0 7\n");
    EXPECT_THROW(load_qrels(dir / "m.tsv"), ParseError);
}

TEST(QrelSet, ValidateAgainstCorpus) {
    QrelSet q;
    q.add(1, 10);
    Corpus c = Corpus::from_pairs({{10, "x"}});
    EXPECT_NO_THROW(q.validate_against(c));
    q.add(2, 11);
    EXPECT_THROW(q.validate_against(c), NotFoundError);
}

}  // namespace
}  // namespace verifact
