#include "verifact/cli/commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <memory>
#include <thread>

#include "verifact/bm25_index.hpp"
#include "verifact/cli/config.hpp"
#include "verifact/corpus.hpp"
#include "verifact/error.hpp"
#include "verifact/llm/backend.hpp"
#include "verifact/llm/gateway.hpp"
#include "verifact/llm/mock_backend.hpp"
#include "verifact/llm/mock_server.hpp"
#include "verifact/pipeline/answer.hpp"
#include "verifact/pipeline/facts.hpp"
#include "verifact/pipeline/run_log.hpp"
#include "verifact/reporting/audit.hpp"
#include "verifact/reporting/report.hpp"
#include "verifact/retrieval.hpp"

namespace verifact::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct MissingInput : Error {
    using Error::Error;
};

void require_file(const fs::path& path, const std::string& flag) {
    if (path.empty()) throw ConfigError(flag + " is required");
    if (!fs::exists(path)) throw MissingInput(flag + " file not found: " + path.string());
}

std::vector<pipeline::EvidenceMode> parse_modes(const std::vector<std::string>& names) {
    std::vector<pipeline::EvidenceMode> out;
    for (const auto& n : names) {
        auto m = pipeline::evidence_mode_from_string(n);
        if (!m) throw ConfigError("unknown evidence mode '" + n + "' (bm25, neural, reader, qrel)");
        if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    }
    if (out.empty()) throw ConfigError("--mode needs at least one evidence mode");
    return out;
}

fs::path index_path_for(const RunConfig& c) {
    if (!c.index_cache.empty()) return c.index_cache;
    fs::path p = c.collection;
    p += ".bm25idx";
    return p;
}

std::vector<Question> load_limited_queries(const RunConfig& c) {
    auto qs = load_queries(c.queries);
    if (c.limit && *c.limit < qs.size()) qs.resize(*c.limit);
    return qs;
}

std::shared_ptr<llm::LlmBackend> make_backend(const RunConfig& c) {
    if (!c.fixtures.empty()) return llm::MockBackend::from_file(c.fixtures);
    return std::shared_ptr<llm::LlmBackend>(llm::HttpBackend::from_env(c.llm_base_url, c.api_key_env));
}

// Corpus plus the BM25 index over it, loaded on demand.
struct Bm25Stack {
    Corpus corpus;
    std::optional<InvertedIndex> index;
    std::unique_ptr<Bm25Retriever> retriever;
};

std::unique_ptr<Bm25Stack> load_bm25(const RunConfig& c, bool with_index, std::ostream& out) {
    auto s = std::make_unique<Bm25Stack>();
    s->corpus = load_collection(c.collection);
    if (with_index) {
        bool rebuilt = false;
        s->index.emplace(load_or_build_index(s->corpus, c.collection, index_path_for(c), c.bm25, &rebuilt));
        out << (rebuilt ? "built" : "loaded") << " index over " << s->index->doc_count() << " passages\n";
        s->retriever = std::make_unique<Bm25Retriever>(*s->index, s->corpus);
    }
    return s;
}

std::unique_ptr<NeuralRetriever> connect_neural(const RunConfig& c) {
    auto r = std::make_unique<NeuralRetriever>(c.neural_url);
    r->require_ready();
    return r;
}

void emit(std::ostream& out, const json& summary) {
    out << summary.dump(-1, ' ', false, json::error_handler_t::replace) << "\n" << std::flush;
}

int cmd_index(const RunConfig& c, std::ostream& out) {
    require_file(c.collection, "--collection");
    auto t0 = std::chrono::steady_clock::now();
    Corpus corpus = load_collection(c.collection);
    bool rebuilt = false;
    fs::path cache = index_path_for(c);
    InvertedIndex index = load_or_build_index(corpus, c.collection, cache, c.bm25, &rebuilt);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << fmt::format("doc_count={} avg_doc_len={:.4f} vocabulary={} build_seconds={:.3f} {}\n", index.doc_count(),
                       index.avg_doc_len(), index.vocabulary_size(), secs, rebuilt ? "rebuilt" : "cached");
    emit(out, {{"command", "index"},
               {"doc_count", index.doc_count()},
               {"avg_doc_len", index.avg_doc_len()},
               {"vocabulary", index.vocabulary_size()},
               {"build_seconds", secs},
               {"rebuilt", rebuilt},
               {"cache", cache.string()}});
    return kExitOk;
}

int cmd_verify(const RunConfig& c, bool dry_run, std::ostream& out) {
    auto modes = parse_modes(c.modes);
    bool need_bm25 = false, need_corpus = false, need_neural = false, need_qrels = false;
    for (auto m : modes) {
        need_bm25 |= m == pipeline::EvidenceMode::Bm25Top1;
        need_corpus |= m == pipeline::EvidenceMode::Bm25Top1 || m == pipeline::EvidenceMode::Qrel;
        need_neural |= m == pipeline::EvidenceMode::NeuralTop1 || m == pipeline::EvidenceMode::ReaderTop3;
        need_qrels |= m == pipeline::EvidenceMode::Qrel;
    }
    require_file(c.queries, "--queries");
    if (need_corpus) require_file(c.collection, "--collection");
    if (need_qrels) require_file(c.qrels, "--qrels");
    if (!dry_run && !c.fixtures.empty()) require_file(c.fixtures, "--mock");
    if (!dry_run && c.run_log.empty()) throw ConfigError("--run is required");

    auto questions = load_limited_queries(c);
    json mode_names = json::array();
    for (auto m : modes) mode_names.push_back(pipeline::to_string(m));
    if (dry_run) {
        auto calls = pipeline::planned_calls_experiment1(questions.size(), modes);
        out << fmt::format("dry run: {} questions x {} modes, at most {} LLM calls\n", questions.size(), modes.size(),
                           calls);
        emit(out, {{"command", "verify"},
                   {"dry_run", true},
                   {"questions", questions.size()},
                   {"modes", mode_names},
                   {"planned_llm_calls", calls}});
        return kExitOk;
    }

    auto backend = make_backend(c);
    std::unique_ptr<NeuralRetriever> neural;
    if (need_neural) neural = connect_neural(c);
    std::unique_ptr<Bm25Stack> bm25;
    if (need_corpus) bm25 = load_bm25(c, need_bm25, out);
    std::optional<QrelSet> qrels;
    if (need_qrels) qrels = load_qrels(c.qrels);

    llm::LlmGateway gateway(backend, c.llm);
    pipeline::AnswerCache cache;
    pipeline::Experiment1Config cfg;
    cfg.sources.bm25 = bm25 && bm25->retriever ? bm25->retriever.get() : nullptr;
    cfg.sources.neural = neural.get();
    cfg.sources.qrels = qrels ? &*qrels : nullptr;
    cfg.sources.corpus = bm25 ? &bm25->corpus : nullptr;
    cfg.parallelism = c.parallelism;
    cfg.context_budget_chars = c.context_budget_chars;
    cfg.cache = &cache;

    pipeline::RunLog log(c.run_log);
    std::map<std::string, std::map<std::string, std::size_t>> verdicts;
    std::size_t written = 0;
    for (auto m : modes) {
        auto records = pipeline::run_experiment1(questions, m, gateway, cfg, &log);
        written += records.size();
        auto& v = verdicts[std::string(pipeline::to_string(m))];
        for (const auto& r : records) ++v[std::string(pipeline::to_string(r.verdict))];
        out << fmt::format("{}: {} records\n", pipeline::to_string(m), records.size());
    }
    emit(out, {{"command", "verify"},
               {"questions", questions.size()},
               {"modes", mode_names},
               {"records_written", written},
               {"skipped", questions.size() * modes.size() - written},
               {"verdicts", verdicts},
               {"llm_calls", gateway.completed_calls()},
               {"run", c.run_log.string()}});
    return kExitOk;
}

int cmd_facts(const RunConfig& c, bool dry_run, std::ostream& out) {
    if (c.retriever != "bm25" && c.retriever != "neural")
        throw ConfigError("unknown retriever '" + c.retriever + "' (bm25, neural)");
    bool use_bm25 = c.retriever == "bm25";
    require_file(c.queries, "--queries");
    if (use_bm25) require_file(c.collection, "--collection");
    if (!dry_run && !c.fixtures.empty()) require_file(c.fixtures, "--mock");
    if (!dry_run && c.run_log.empty()) throw ConfigError("--run is required");

    auto questions = load_limited_queries(c);
    if (dry_run) {
        // answer + extraction, then per statement validation and at most one post-edit;
        // statement counts are unknown before the run
        out << fmt::format("dry run: {} questions, {} LLM calls before statements, up to 2 per statement\n",
                           questions.size(), 2 * questions.size());
        emit(out, {{"command", "facts"},
                   {"dry_run", true},
                   {"questions", questions.size()},
                   {"retriever", c.retriever},
                   {"planned_llm_calls_fixed", 2 * questions.size()},
                   {"planned_llm_calls_per_statement", 2}});
        return kExitOk;
    }

    auto backend = make_backend(c);
    std::unique_ptr<NeuralRetriever> neural;
    std::unique_ptr<Bm25Stack> bm25;
    Retriever* retriever = nullptr;
    if (use_bm25) {
        bm25 = load_bm25(c, true, out);
        retriever = bm25->retriever.get();
    } else {
        neural = connect_neural(c);
        retriever = neural.get();
    }
    llm::LlmGateway gateway(backend, c.llm);
    pipeline::RunLog log(c.run_log);
    pipeline::Experiment2Config cfg;
    cfg.parallelism = c.parallelism;
    auto results = pipeline::run_experiment2(questions, *retriever, gateway, cfg, &log);
    std::size_t facts = 0, failures = 0, errors = 0;
    for (const auto& r : results) {
        facts += r.facts.size();
        if (!r.answer.error.empty()) ++errors;
        else if (r.answer.extraction_failure) ++failures;
    }
    out << fmt::format("{}: {} questions, {} statements\n", c.retriever, results.size(), facts);
    emit(out, {{"command", "facts"},
               {"questions", questions.size()},
               {"answers_written", results.size()},
               {"facts_written", facts},
               {"extraction_failures", failures},
               {"errors", errors},
               {"llm_calls", gateway.completed_calls()},
               {"run", c.run_log.string()}});
    return kExitOk;
}

int cmd_report(const RunConfig& c, const std::string& json_out, std::ostream& out) {
    require_file(c.run_log, "--run");
    auto report = reporting::tabulate(pipeline::read_run_log(c.run_log));
    out << reporting::format_text(report);
    json j = reporting::to_json(report);
    if (!json_out.empty()) {
        std::ofstream f(json_out);
        if (!f) throw Error("cannot write " + json_out);
        f << j.dump(2) << "\n";
    }
    emit(out, {{"command", "report"}, {"report", j}});
    return kExitOk;
}

int cmd_sample(const RunConfig& c, const std::string& cell_text, std::size_t n, std::ostream& out) {
    require_file(c.run_log, "--run");
    if (c.samples.empty()) throw ConfigError("--out is required");
    auto cell = reporting::CellKey::parse(cell_text);
    auto log = pipeline::read_run_log(c.run_log);
    auto population = reporting::cell_population(log, cell).size();
    auto samples = reporting::sample_cell(log, cell, n, c.seed);
    if (c.samples.has_parent_path()) fs::create_directories(c.samples.parent_path());
    std::ofstream f(c.samples);
    if (!f) throw Error("cannot write " + c.samples.string());
    for (const auto& s : samples) f << reporting::to_json(s).dump() << "\n";
    out << fmt::format("sampled {} of {} from {}\n", samples.size(), population, cell.str());
    emit(out, {{"command", "sample"},
               {"cell", cell.str()},
               {"population", population},
               {"sampled", samples.size()},
               {"seed", c.seed},
               {"out", c.samples.string()}});
    return kExitOk;
}

int cmd_label(const RunConfig& c, std::string labeller, bool report_only, std::istream& in, std::ostream& out) {
    if (labeller.empty()) {
        const char* user = std::getenv("USER");
        labeller = user && *user ? user : "labeller";
    }
    fs::path audit = c.audit;
    if (audit.empty()) {
        if (c.samples.empty()) throw ConfigError("--audit or --samples is required");
        audit = c.samples;
        audit += ".audit.jsonl";
    }
    std::size_t added = 0;
    if (!report_only) {
        require_file(c.run_log, "--run");
        require_file(c.samples, "--samples");
        auto log = pipeline::read_run_log(c.run_log);
        std::vector<reporting::SampleRef> samples;
        std::ifstream f(c.samples);
        std::string line;
        while (std::getline(f, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                samples.push_back(reporting::sample_from_json(json::parse(line)));
        added = reporting::label_session(log, samples, audit, labeller, in, out).size();
    } else {
        require_file(audit, "--audit");
    }
    auto labels = reporting::read_audit_file(audit);
    std::vector<reporting::AuditLabel> mine;
    for (auto& l : labels)
        if (l.labeller == labeller) mine.push_back(std::move(l));
    auto rows = reporting::agreement_report(mine);
    if (!rows.empty()) out << reporting::format_agreement(rows);
    json cells = json::array();
    for (const auto& r : rows)
        cells.push_back({{"cell", r.cell}, {"correct", r.correct}, {"incorrect", r.incorrect},
                         {"accuracy", r.accuracy.str()}});
    emit(out, {{"command", "label"},
               {"labeller", labeller},
               {"added", added},
               {"audit", audit.string()},
               {"agreement", cells}});
    return kExitOk;
}

int cmd_serve_mock(const RunConfig& c, const std::string& host, int port, std::ostream& out) {
    require_file(c.fixtures, "--fixtures");
    auto backend = llm::MockBackend::from_file(c.fixtures);
    llm::MockServer server(backend);
    int bound = server.start(host, port);
    emit(out, {{"command", "serve-mock"},
               {"host", host},
               {"port", bound},
               {"fixtures", backend->fixture_count()}});
    for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}

// Returns the value of --config if present, so the file can seed defaults before flags.
std::optional<std::string> find_config_flag(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    RunConfig c;
    try {
        if (auto path = find_config_flag(args)) {
            require_file(*path, "--config");
            apply_config_file(c, *path);
        }
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    CLI::App app{"Retrieval-backed verification of LLM answers", "verifact"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "key = value settings file; flags override it");

    std::string collection = c.collection.string(), queries = c.queries.string(), qrels = c.qrels.string(),
                index = c.index_cache.string(), run = c.run_log.string(), fixtures = c.fixtures.string(),
                samples = c.samples.string(), audit = c.audit.string();
    std::optional<std::size_t> limit;
    bool dry_run = false, report_only = false;
    std::string cell, json_out, labeller, host = "127.0.0.1";
    std::size_t n = 100;
    int port = 8089;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--seed", c.seed, "random seed");
    };
    auto add_run_inputs = [&](CLI::App* s) {
        add_common(s);
        s->add_option("--collection", collection, "passage collection (pid<TAB>text)");
        s->add_option("--queries", queries, "questions (qid<TAB>text)");
        s->add_option("--index", index, "BM25 index cache file");
        s->add_option("--run", run, "JSON-lines run log (appended, resumable)");
        s->add_option("--mock", fixtures, "answer LLM calls from a fixture file instead of the network");
        s->add_option("--limit", limit, "only the first N questions");
        s->add_option("--llm-url", c.llm_base_url, "OpenAI-compatible base URL");
        s->add_option("--model", c.llm.model, "chat model id");
        s->add_option("--neural-url", c.neural_url, "neural retrieval service base URL");
        s->add_option("--concurrency", c.llm.concurrency, "maximum in-flight LLM calls");
        s->add_option("--parallelism", c.parallelism, "questions processed at once");
        s->add_option("--rpm", c.llm.requests_per_minute, "LLM requests per minute (0 = unlimited)");
        s->add_option("--max-attempts", c.llm.max_attempts, "attempts per LLM call");
        s->add_option("--k1", c.bm25.k1, "BM25 k1");
        s->add_option("--b", c.bm25.b, "BM25 b");
        s->add_flag("--dry-run", dry_run, "print planned LLM call counts and exit");
    };

    auto* index_cmd = app.add_subcommand("index", "build or refresh the BM25 index cache");
    add_common(index_cmd);
    index_cmd->add_option("--collection", collection, "passage collection (pid<TAB>text)");
    index_cmd->add_option("--index", index, "index cache file (default <collection>.bm25idx)");
    index_cmd->add_option("--k1", c.bm25.k1, "BM25 k1");
    index_cmd->add_option("--b", c.bm25.b, "BM25 b");

    auto* verify_cmd = app.add_subcommand("verify", "whole-answer verification");
    add_run_inputs(verify_cmd);
    std::vector<std::string> modes;
    verify_cmd->add_option("--mode", modes, "evidence modes: bm25, neural, reader, qrel")->delimiter(',');
    verify_cmd->add_option("--qrels", qrels, "relevance judgments (TREC format)");
    verify_cmd->add_option("--context-budget", c.context_budget_chars, "prompt size cap in bytes (0 = none)");

    auto* facts_cmd = app.add_subcommand("facts", "statement extraction, validation and post-editing");
    add_run_inputs(facts_cmd);
    facts_cmd->add_option("--retriever", c.retriever, "bm25 or neural");

    auto* report_cmd = app.add_subcommand("report", "tabulate a run log");
    add_common(report_cmd);
    report_cmd->add_option("--run", run, "run log");
    report_cmd->add_option("--json", json_out, "also write the report as JSON to this file");

    auto* sample_cmd = app.add_subcommand("sample", "draw an audit sample from one table cell");
    add_common(sample_cmd);
    sample_cmd->add_option("--run", run, "run log");
    sample_cmd->add_option("--cell", cell, "table:column:row, e.g. fact:neural:Contradictory")->required();
    sample_cmd->add_option("--n", n, "sample size");
    sample_cmd->add_option("--out", samples, "sample file to write");

    auto* label_cmd = app.add_subcommand("label", "label sampled records interactively");
    add_common(label_cmd);
    label_cmd->add_option("--run", run, "run log");
    label_cmd->add_option("--samples", samples, "sample file from `sample`");
    label_cmd->add_option("--audit", audit, "audit label file (default <samples>.audit.jsonl)");
    label_cmd->add_option("--labeller", labeller, "labeller name (default $USER)");
    label_cmd->add_flag("--report-only", report_only, "print agreement for existing labels and exit");

    auto* serve_cmd = app.add_subcommand("serve-mock", "serve fixture replies on an OpenAI-compatible endpoint");
    add_common(serve_cmd);
    serve_cmd->add_option("--fixtures", fixtures, "fixture file");
    serve_cmd->add_option("--host", host, "bind address");
    serve_cmd->add_option("--port", port, "port (0 picks a free one)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    c.collection = collection;
    c.queries = queries;
    c.qrels = qrels;
    c.index_cache = index;
    c.run_log = run;
    c.fixtures = fixtures;
    c.samples = samples;
    c.audit = audit;
    if (limit) c.limit = limit;
    if (!modes.empty()) c.modes = modes;

    try {
        if (index_cmd->parsed()) return cmd_index(c, out);
        if (verify_cmd->parsed()) return cmd_verify(c, dry_run, out);
        if (facts_cmd->parsed()) return cmd_facts(c, dry_run, out);
        if (report_cmd->parsed()) return cmd_report(c, json_out, out);
        if (sample_cmd->parsed()) return cmd_sample(c, cell, n, out);
        if (label_cmd->parsed()) return cmd_label(c, labeller, report_only, in, out);
        if (serve_cmd->parsed()) return cmd_serve_mock(c, host, port, out);
    } catch (const MissingInput& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace verifact::cli
