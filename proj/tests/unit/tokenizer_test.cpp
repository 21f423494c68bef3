#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <string>

#include "verifact/tokenizer.hpp"

#ifndef VERIFACT_TEST_DATA
#define VERIFACT_TEST_DATA "tests/data"
#endif

namespace verifact {
namespace {

TEST(PorterStemmer, MatchesReferenceVectors) {
    std::ifstream in(std::string(VERIFACT_TEST_DATA) + "/porter_vectors.tsv");
    ASSERT_TRUE(in) << "missing porter_vectors.tsv";
    std::string line;
    int checked = 0, wrong = 0;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        ASSERT_NE(tab, std::string::npos) << line;
        std::string word = line.substr(0, tab), want = line.substr(tab + 1);
        std::string got = porter_stem(word);
        if (got != want) {
            ADD_FAILURE() << word << ": got " << got << ", want " << want;
            if (++wrong > 20) break;
        }
        ++checked;
    }
    EXPECT_GT(checked, 1000);
}

TEST(PorterStemmer, ClassicExamples) {
    EXPECT_EQ(porter_stem("caresses"), "caress");
    EXPECT_EQ(porter_stem("ponies"), "poni");
    EXPECT_EQ(porter_stem("running"), "run");
    EXPECT_EQ(porter_stem("relational"), "relat");
    EXPECT_EQ(porter_stem("generalization"), "gener");
    EXPECT_EQ(porter_stem("hopeful"), "hope");
}

TEST(Tokenizer, LowercasesSplitsAndStems) {
    EXPECT_EQ(tokenize("Who sings the song Rise Up?"), (TokenStream{"who", "sing", "the", "song", "rise", "up"}));
    EXPECT_EQ(tokenize("monuments in Washington-DC"), (TokenStream{"monument", "in", "washington", "dc"}));
}

TEST(Tokenizer, DigitsAndMixedTokensKept) {
    EXPECT_EQ(tokenize("$120,000 in 2019"), (TokenStream{"120", "000", "in", "2019"}));
    EXPECT_EQ(tokenize("mp3 players"), (TokenStream{"mp3", "player"}));
}

TEST(Tokenizer, ShortTokensNotStemmed) {
    EXPECT_EQ(tokenize("is as us"), (TokenStream{"is", "as", "us"}));
}

TEST(Tokenizer, StopwordRemovalOptional) {
    TokenizerOptions opts;
    opts.remove_stopwords = true;
    EXPECT_EQ(tokenize("the song is by a singer", opts), (TokenStream{"song", "singer"}));
    EXPECT_TRUE(is_stopword("the"));
    EXPECT_FALSE(is_stopword("song"));
}

TEST(Tokenizer, NonAsciiBytesStayInsideTokens) {
    TokenizerOptions opts;
    opts.stem = false;
    EXPECT_EQ(tokenize("Café Müller", opts), (TokenStream{"café", "müller"}));
}

TEST(Tokenizer, EmptyAndPunctuationOnly) {
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize(" ,.;!? \t\n").empty());
}

TEST(Tokenizer, OptionsRoundTripThroughFlags) {
    for (bool stem : {false, true})
        for (bool stop : {false, true}) {
            TokenizerOptions o{stem, stop};
            auto back = TokenizerOptions::from_flags(o.flags());
            EXPECT_EQ(back.stem, stem);
            EXPECT_EQ(back.remove_stopwords, stop);
        }
}

std::string random_text(std::mt19937& rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJ0123456789 .,-'?\t";
    std::uniform_int_distribution<std::size_t> len(0, 80), pick(0, alphabet.size() - 1);
    std::string s(len(rng), ' ');
    for (auto& c : s) c = alphabet[pick(rng)];
    return s;
}

TEST(TokenizerProperty, UnstemmedTokenizationIsIdempotent) {
    TokenizerOptions opts;
    opts.stem = false;
    std::mt19937 rng(11);
    for (int i = 0; i < 500; ++i) {
        auto once = tokenize(random_text(rng), opts);
        std::string joined;
        for (auto& t : once) joined += t + " ";
        EXPECT_EQ(tokenize(joined, opts), once);
    }
}

TEST(TokenizerProperty, TokensAreLowercaseAlnumWithoutSeparators) {
    std::mt19937 rng(12);
    for (int i = 0; i < 500; ++i) {
        for (const auto& t : tokenize(random_text(rng))) {
            ASSERT_FALSE(t.empty());
            for (unsigned char c : t) EXPECT_TRUE(std::islower(c) || std::isdigit(c)) << t;
        }
    }
}

TEST(TokenizerProperty, StreamingMatchesMaterialized) {
    std::mt19937 rng(13);
    TokenizerOptions opts;
    for (int i = 0; i < 200; ++i) {
        std::string text = random_text(rng);
        TokenStream streamed;
        for_each_token(text, opts, [&](std::string_view t) { streamed.emplace_back(t); });
        EXPECT_EQ(streamed, tokenize(text, opts));
    }
}

}  // namespace
}  // namespace verifact
