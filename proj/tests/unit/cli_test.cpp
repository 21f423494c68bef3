#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "test_support.hpp"
#include "verifact/cli/commands.hpp"
#include "verifact/cli/config.hpp"
#include "verifact/error.hpp"
#include "verifact/pipeline/run_log.hpp"

namespace verifact::cli {
namespace {

struct Result {
    int code;
    std::string out, err;
    nlohmann::json summary() const {
        auto trimmed = out.substr(0, out.find_last_not_of('\n') + 1);
        return nlohmann::json::parse(trimmed.substr(trimmed.rfind('\n') + 1));
    }
};

Result run(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        testing::write_text(dir / "collection.tsv",
                            "1\tAndra Day recorded the song Rise Up\n"
                            "2\tTanya Tucker had a hit with Delta Dawn\n"
                            "3\tPowell Wyoming weather forecast\n"
                            "4\tThe Washington Monument is in Washington DC\n");
        testing::write_text(dir / "queries.tsv",
                            "11\twho sings the song rise up\n"
                            "12\twho sang delta dawn\n"
                            "13\twhat is the weather in powell wy\n"
                            "14\twhat monuments are in washington dc\n");
        testing::write_text(dir / "qrels.txt", "11 0 1 1\n12 0 2 1\n13 0 3 1\n14 0 4 1\n");
        testing::write_text(dir / "fixtures.jsonl",
                            R"({"template": "Answer", "fallback": "Andra Day"})" "\n"
                            R"({"template": "DirectCheck", "fallback": "Yes. It answers the question."})" "\n"
                            R"({"template": "SupportCheck", "fallback": "Yes. The evidence agrees."})" "\n"
                            R"({"template": "Reader", "fallback": "Andra Day"})" "\n"
                            R"({"template": "FactExtract", "fallback": "- Andra Day sings Rise Up.\n- Rise Up exists."})" "\n"
                            R"({"template": "FactValidate", "fallback": "Contradictory. Different singer."})" "\n"
                            R"({"template": "FactPostEdit", "fallback": "Someone else sings Rise Up."})" "\n");
    }
    std::string p(const char* name) const { return (dir / name).string(); }
    std::vector<std::string> verify_args(std::string mode, std::string limit) const {
        return {"verify", "--mode", mode, "--limit", limit, "--mock", p("fixtures.jsonl"), "--queries",
                p("queries.tsv"), "--collection", p("collection.tsv"), "--qrels", p("qrels.txt"), "--run",
                p("run.jsonl")};
    }
    testing::TempDir dir;
};

TEST_F(CliTest, IndexWritesCacheAndSummary) {
    auto r = run({"index", "--collection", p("collection.tsv"), "--index", p("c.idx")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "c.idx"));
    auto s = r.summary();
    EXPECT_EQ(s["command"], "index");
    EXPECT_EQ(s["doc_count"], 4);
    EXPECT_EQ(s["rebuilt"], true);
    EXPECT_EQ(run({"index", "--collection", p("collection.tsv"), "--index", p("c.idx")}).summary()["rebuilt"], false);
    auto changed = run({"index", "--collection", p("collection.tsv"), "--index", p("c.idx"), "--k1", "1.2"});
    EXPECT_EQ(changed.summary()["rebuilt"], true);
}

TEST_F(CliTest, MissingFileExitsTwoNamingPath) {
    auto r = run({"index", "--collection", p("nope.tsv")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find(p("nope.tsv")), std::string::npos) << r.err;
    auto v = run({"verify", "--mode", "bm25", "--queries", p("absent.tsv"), "--collection", p("collection.tsv")});
    EXPECT_EQ(v.code, kExitUsage);
    EXPECT_NE(v.err.find("absent.tsv"), std::string::npos);
}

TEST_F(CliTest, BadUsageExitsTwo) {
    EXPECT_EQ(run({}).code, kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--mode", "telepathy", "--queries", p("queries.tsv")}).code, kExitUsage);
    EXPECT_EQ(run({"sample", "--run", p("run.jsonl")}).code, kExitUsage);
}

TEST_F(CliTest, VerifyBm25LimitThreeWritesThreeRecords) {
    auto r = run(verify_args("bm25", "3"));
    ASSERT_EQ(r.code, kExitOk) << r.err << r.out;
    EXPECT_EQ(r.summary()["records_written"], 3);
    auto log = pipeline::read_run_log(dir / "run.jsonl");
    ASSERT_EQ(log.verifications.size(), 3u);
    EXPECT_EQ(log.verifications[0].qid, 11);
    EXPECT_EQ(log.verifications[2].qid, 13);
    EXPECT_EQ(log.verifications[0].verdict, pipeline::Verdict::Yes);

    auto again = run(verify_args("bm25", "4"));
    ASSERT_EQ(again.code, kExitOk) << again.err;
    EXPECT_EQ(again.summary()["records_written"], 1);
    EXPECT_EQ(pipeline::read_run_log(dir / "run.jsonl").verifications.size(), 4u);
}

TEST_F(CliTest, VerifyAllOfflineModes) {
    auto r = run(verify_args("bm25,qrel", "4"));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto log = pipeline::read_run_log(dir / "run.jsonl");
    ASSERT_EQ(log.verifications.size(), 8u);
    EXPECT_EQ(log.verifications[4].mode, pipeline::EvidenceMode::Qrel);
    EXPECT_EQ(log.verifications[4].evidence_pids, (std::vector<PassageId>{1}));
}

TEST_F(CliTest, DryRunMakesNoCalls) {
    auto args = verify_args("bm25,qrel", "2");
    args[6] = p("no-such-fixtures.jsonl");
    args.push_back("--dry-run");
    auto r = run(args);
    ASSERT_EQ(r.code, kExitOk) << r.err;
    auto s = r.summary();
    EXPECT_EQ(s["dry_run"], true);
    EXPECT_EQ(s["planned_llm_calls"], 2 * (2 + 2 + 1));
    EXPECT_FALSE(std::filesystem::exists(dir / "run.jsonl"));
}

TEST_F(CliTest, ReportOnVerificationLog) {
    ASSERT_EQ(run(verify_args("bm25", "4")).code, kExitOk);
    auto r = run({"report", "--run", p("run.jsonl"), "--json", p("report.json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("4 (100.00%)"), std::string::npos) << r.out;
    EXPECT_EQ(r.summary()["command"], "report");
    EXPECT_TRUE(std::filesystem::exists(dir / "report.json"));
    EXPECT_EQ(run({"report", "--run", p("missing.jsonl")}).code, kExitUsage);
}

TEST_F(CliTest, FactsThenSampleThenLabel) {
    auto f = run({"facts", "--retriever", "bm25", "--limit", "2", "--mock", p("fixtures.jsonl"), "--queries",
                  p("queries.tsv"), "--collection", p("collection.tsv"), "--run", p("facts.jsonl")});
    ASSERT_EQ(f.code, kExitOk) << f.err;
    EXPECT_EQ(f.summary()["facts_written"], 4);
    auto rep = run({"report", "--run", p("facts.jsonl")});
    ASSERT_EQ(rep.code, kExitOk) << rep.err;
    EXPECT_NE(rep.out.find("Contradictory"), std::string::npos);

    auto s = run({"sample", "--run", p("facts.jsonl"), "--cell", "fact:bm25:Contradictory", "--n", "3", "--seed", "7",
                  "--out", p("samples.jsonl")});
    ASSERT_EQ(s.code, kExitOk) << s.err;
    EXPECT_EQ(s.summary()["sampled"], 3);
    EXPECT_EQ(s.summary()["population"], 4);
    auto s2 = run({"sample", "--run", p("facts.jsonl"), "--cell", "fact:bm25:Contradictory", "--n", "3", "--seed",
                   "7", "--out", p("samples2.jsonl")});
    EXPECT_EQ(testing::read_text(dir / "samples.jsonl"), testing::read_text(dir / "samples2.jsonl"));

    auto l = run({"label", "--run", p("facts.jsonl"), "--samples", p("samples.jsonl"), "--labeller", "ana"},
                 "c\ni wrong edit\nc\n");
    ASSERT_EQ(l.code, kExitOk) << l.err;
    EXPECT_EQ(l.summary()["added"], 3);
    EXPECT_EQ(l.summary()["agreement"][0]["accuracy"], "66.67");
    auto ro = run({"label", "--samples", p("samples.jsonl"), "--labeller", "ana", "--report-only"});
    ASSERT_EQ(ro.code, kExitOk) << ro.err;
    EXPECT_EQ(ro.summary()["added"], 0);
    EXPECT_EQ(ro.summary()["agreement"][0]["correct"], 2);

    auto empty = run({"sample", "--run", p("facts.jsonl"), "--cell", "fact:bm25:Supported", "--out", p("e.jsonl")});
    EXPECT_EQ(empty.code, kExitFailure);
    EXPECT_NE(empty.err.find("empty"), std::string::npos) << empty.err;
}

TEST_F(CliTest, ConfigFileAndFlagsOverride) {
    testing::write_text(dir / "run.conf", "# settings\nqueries = " + p("queries.tsv") + "\ncollection = " +
                                              p("collection.tsv") + "\nrun = " + p("run.jsonl") +
                                              "\nlimit = 1\nmode = bm25\n");
    auto r = run({"verify", "--config", p("run.conf"), "--mock", p("fixtures.jsonl")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.summary()["records_written"], 1);
    auto more = run({"verify", "--config", p("run.conf"), "--mock", p("fixtures.jsonl"), "--limit", "2"});
    ASSERT_EQ(more.code, kExitOk) << more.err;
    EXPECT_EQ(more.summary()["records_written"], 1);
}

TEST_F(CliTest, TemperatureAndCredentialsNotConfigurable) {
    testing::write_text(dir / "bad.conf", "temperature = 0.7\n");
    auto r = run({"verify", "--config", p("bad.conf"), "--queries", p("queries.tsv")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("temperature"), std::string::npos);
    EXPECT_EQ(run({"verify", "--temperature", "0.7", "--queries", p("queries.tsv")}).code, kExitUsage);
    EXPECT_EQ(run({"verify", "--api-key", "sk-123", "--queries", p("queries.tsv")}).code, kExitUsage);
    testing::write_text(dir / "key.conf", "api_key = sk-123\n");
    EXPECT_EQ(run({"verify", "--config", p("key.conf")}).code, kExitUsage);
}

TEST_F(CliTest, NetworkLlmNeedsCredentialFromEnvironment) {
    ::unsetenv("VERIFACT_TEST_UNSET_KEY");
    testing::write_text(dir / "net.conf", "api_key_env = VERIFACT_TEST_UNSET_KEY\nllm_url = http://127.0.0.1:9\n");
    auto args = verify_args("bm25", "1");
    args.erase(args.begin() + 5, args.begin() + 7);
    args.insert(args.end(), {"--config", p("net.conf")});
    auto r = run(args);
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("VERIFACT_TEST_UNSET_KEY"), std::string::npos) << r.err;
}

TEST(Config, ParsesKeysAndRejectsUnknown) {
    RunConfig c;
    apply_config_text(c, "k1 = 1.5\nb=0.4\nmode = bm25, qrel\nseed = 9\nparallelism = 2\n# comment\n\n");
    EXPECT_DOUBLE_EQ(c.bm25.k1, 1.5);
    EXPECT_DOUBLE_EQ(c.bm25.b, 0.4);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.parallelism, 2u);
    EXPECT_THROW(apply_config_text(c, "colour = blue\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "k1 = abc\n"), ConfigError);
    EXPECT_THROW(apply_config_text(c, "no equals sign\n"), ConfigError);
}

}  // namespace
}  // namespace verifact::cli
