#include "verifact/reporting/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "verifact/error.hpp"

namespace verifact::reporting {

using pipeline::EvidenceMode;
using pipeline::FactStatus;
using pipeline::GateStatus;
using pipeline::Verdict;

std::string_view to_string(TableKind t) noexcept {
    switch (t) {
    case TableKind::DirectAnswers: return "direct";
    case TableKind::SupportPairs: return "support";
    case TableKind::FactPairs: return "fact";
    }
    return "?";
}

std::string CellKey::str() const {
    return std::string(to_string(table)) + ":" + column + ":" + row;
}

CellKey CellKey::parse(std::string_view s) {
    auto a = s.find(':');
    auto b = a == std::string_view::npos ? a : s.find(':', a + 1);
    if (b == std::string_view::npos || a == 0 || b == a + 1 || b + 1 == s.size())
        throw Error("bad cell key '" + std::string(s) + "', expected table:column:row");
    std::string_view t = s.substr(0, a);
    CellKey k;
    if (t == "direct") k.table = TableKind::DirectAnswers;
    else if (t == "support") k.table = TableKind::SupportPairs;
    else if (t == "fact") k.table = TableKind::FactPairs;
    else throw Error("bad cell table '" + std::string(t) + "'");
    k.column = std::string(s.substr(a + 1, b - a - 1));
    k.row = std::string(s.substr(b + 1));
    return k;
}

std::string Percent::str() const {
    return fmt::format("{}.{:02}", hundredths / 100, hundredths % 100);
}

Percent percent_of(std::uint64_t count, std::uint64_t total) {
    if (total == 0) throw Error("percentage of an empty total");
    // round(10000 * c / t) half-up == floor((20000 c + t) / 2t)
    unsigned __int128 num = static_cast<unsigned __int128>(count) * 20000 + total;
    return {static_cast<std::int64_t>(num / (static_cast<unsigned __int128>(total) * 2))};
}

Percent mean_percent(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fractions) {
    if (fractions.empty()) return {};
    long double sum = 0;
    for (auto [c, t] : fractions) sum += static_cast<long double>(c) / static_cast<long double>(t);
    long double scaled = sum * 10000.0L / static_cast<long double>(fractions.size());
    return {static_cast<std::int64_t>(std::floor(scaled + 0.5L + 1e-9L))};
}

std::uint64_t RunReport::count(const CellKey& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
}

std::optional<Percent> RunReport::percent(const CellKey& key) const {
    auto it = percents.find(key);
    if (it == percents.end()) return std::nullopt;
    return it->second;
}

namespace {

const std::vector<std::string> kColumnOrder = {"generated", "reader", "neural", "bm25", "qrel"};

int column_rank(const std::string& c) {
    auto it = std::find(kColumnOrder.begin(), kColumnOrder.end(), c);
    return static_cast<int>(it - kColumnOrder.begin());
}

const std::vector<std::string>& row_order(TableKind t) {
    static const std::vector<std::string> direct = {"Yes", "No", "Unparseable"};
    static const std::vector<std::string> support = {"Yes", "No", "NotRelated", "Unparseable", "Error"};
    static const std::vector<std::string> fact = {"Supported", "Contradictory", "Neither", "Unparseable"};
    switch (t) {
    case TableKind::DirectAnswers: return direct;
    case TableKind::SupportPairs: return support;
    default: return fact;
    }
}

void add_percents(RunReport& r, TableKind table, const std::vector<std::string>& over) {
    for (const auto& col : r.columns(table)) {
        std::uint64_t total = 0;
        for (const auto& row : over) total += r.count({table, col, row});
        if (total == 0) continue;
        for (const auto& row : over) r.percents[{table, col, row}] = percent_of(r.count({table, col, row}), total);
    }
}

void bump_gate(RunReport& r, const std::string& column, const pipeline::GateOutcome& g) {
    if (g.status == GateStatus::Skipped) return;
    ++r.counts[{TableKind::DirectAnswers, column, std::string(pipeline::to_string(g.status))}];
}

}  // namespace

std::vector<std::string> RunReport::columns(TableKind table) const {
    std::set<std::string> seen;
    for (const auto& [k, _] : counts)
        if (k.table == table) seen.insert(k.column);
    std::vector<std::string> out(seen.begin(), seen.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const std::string& a, const std::string& b) { return column_rank(a) < column_rank(b); });
    return out;
}

std::vector<std::string> RunReport::rows(TableKind table) const {
    return row_order(table);
}

RunReport tabulate(const std::vector<pipeline::VerificationRecord>& records) {
    RunReport r;
    r.kind = ExperimentKind::Verification;
    // One generated-answer gate per qid; the lowest (mode, status) wins so record order never matters.
    std::map<QueryId, std::pair<EvidenceMode, const pipeline::GateOutcome*>> generated;
    for (const auto& rec : records) {
        if (rec.gate_generated.status != GateStatus::Skipped) {
            auto [it, fresh] = generated.try_emplace(rec.qid, rec.mode, &rec.gate_generated);
            if (!fresh && std::pair(rec.mode, rec.gate_generated.status) < std::pair(it->second.first, it->second.second->status))
                it->second = {rec.mode, &rec.gate_generated};
        }
        std::string mode(pipeline::to_string(rec.mode));
        bump_gate(r, mode, rec.gate_evidence);
        ++r.counts[{TableKind::SupportPairs, mode, std::string(pipeline::to_string(rec.verdict))}];
    }
    for (const auto& [qid, g] : generated) bump_gate(r, "generated", *g.second);
    add_percents(r, TableKind::DirectAnswers, {"Yes", "No"});
    add_percents(r, TableKind::SupportPairs, {"Yes", "No"});
    return r;
}

RunReport tabulate(const std::vector<pipeline::FactRecord>& facts,
                   const std::vector<pipeline::AttributedAnswer>& answers) {
    RunReport r;
    r.kind = ExperimentKind::Facts;
    struct PerQuestion {
        std::uint64_t s = 0, c = 0, n = 0, u = 0;
    };
    std::map<std::string, std::map<QueryId, PerQuestion>> groups;
    for (const auto& f : facts) {
        ++r.counts[{TableKind::FactPairs, f.retriever, std::string(pipeline::to_string(f.verdict))}];
        auto& q = groups[f.retriever][f.qid];
        switch (f.verdict) {
        case FactStatus::Supported: ++q.s; break;
        case FactStatus::Contradictory: ++q.c; break;
        case FactStatus::Neither: ++q.n; break;
        case FactStatus::Unparseable: ++q.u; break;
        }
        auto& x = r.fact_extras[f.retriever];
        if (f.length_anomaly) ++x.length_anomalies;
        if (f.no_evidence) ++x.no_evidence;
    }
    std::map<std::string, std::set<QueryId>> asked;
    for (const auto& a : answers) {
        auto& x = r.fact_extras[a.retriever];
        if (!asked[a.retriever].insert(a.qid).second) continue;
        ++x.questions;
        if (!a.error.empty()) ++x.errors;
        else if (a.extraction_failure) ++x.extraction_failures;
    }
    for (auto& [retriever, qs] : groups) {
        auto& x = r.fact_extras[retriever];
        std::vector<std::pair<std::uint64_t, std::uint64_t>> fs, fc, fn;
        for (const auto& [qid, q] : qs) {
            ++x.with_statements;
            std::uint64_t classified = q.s + q.c + q.n;
            if (classified > 0) {
                fs.emplace_back(q.s, classified);
                fc.emplace_back(q.c, classified);
                fn.emplace_back(q.n, classified);
            }
            if (q.s == q.s + q.c + q.n + q.u) ++x.fully_supported;
            if (q.s == 0) ++x.none_supported;
            if (q.c == 0) ++x.none_contradictory;
        }
        x.avg_supported = mean_percent(fs);
        x.avg_contradictory = mean_percent(fc);
        x.avg_neither = mean_percent(fn);
        x.fully_supported_pct = percent_of(x.fully_supported, x.with_statements);
        x.none_supported_pct = percent_of(x.none_supported, x.with_statements);
        x.none_contradictory_pct = percent_of(x.none_contradictory, x.with_statements);
    }
    add_percents(r, TableKind::FactPairs, {"Supported", "Contradictory", "Neither"});
    return r;
}

RunReport tabulate(const pipeline::RunLogContents& log) {
    bool v = !log.verifications.empty();
    bool f = !log.facts.empty() || !log.answers.empty();
    if (v && f) throw Error("run log mixes whole-answer and statement records; report them separately");
    if (!v && !f) throw Error("run log has no records");
    return v ? tabulate(log.verifications) : tabulate(log.facts, log.answers);
}

namespace {

const char* table_title(TableKind t) {
    switch (t) {
    case TableKind::DirectAnswers: return "Does the answer directly answer the question?";
    case TableKind::SupportPairs: return "Does the evidence support the generated answer?";
    default: return "Statement-evidence classifications";
    }
}

std::string format_table(const RunReport& r, TableKind t) {
    auto cols = r.columns(t);
    if (cols.empty()) return {};
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head = {""};
    head.insert(head.end(), cols.begin(), cols.end());
    grid.push_back(head);
    for (const auto& row : r.rows(t)) {
        std::vector<std::string> line = {row};
        bool any = false;
        for (const auto& col : cols) {
            CellKey k{t, col, row};
            auto c = r.count(k);
            any = any || c > 0;
            auto p = r.percent(k);
            line.push_back(p ? fmt::format("{} ({}%)", c, p->str()) : std::to_string(c));
        }
        if (any || row == "Yes" || row == "No" || row == "Supported" || row == "Contradictory" || row == "Neither")
            grid.push_back(std::move(line));
    }
    if (t == TableKind::FactPairs) {
        auto extra = [&](const char* name, auto get) {
            std::vector<std::string> line = {name};
            for (const auto& col : cols) {
                auto it = r.fact_extras.find(col);
                line.push_back(it == r.fact_extras.end() ? "-" : get(it->second));
            }
            grid.push_back(std::move(line));
        };
        extra("Avg % supported per query", [](const FactExtras& x) { return x.avg_supported.str() + "%"; });
        extra("Avg % contradictory per query", [](const FactExtras& x) { return x.avg_contradictory.str() + "%"; });
        extra("Avg % neither per query", [](const FactExtras& x) { return x.avg_neither.str() + "%"; });
        extra("Fully supported responses",
              [](const FactExtras& x) { return fmt::format("{} ({}%)", x.fully_supported, x.fully_supported_pct.str()); });
        extra("None supported responses",
              [](const FactExtras& x) { return fmt::format("{} ({}%)", x.none_supported, x.none_supported_pct.str()); });
        extra("None contradictory responses", [](const FactExtras& x) {
            return fmt::format("{} ({}%)", x.none_contradictory, x.none_contradictory_pct.str());
        });
        extra("Questions", [](const FactExtras& x) { return std::to_string(x.questions); });
        extra("With statements", [](const FactExtras& x) { return std::to_string(x.with_statements); });
        extra("Extraction failures", [](const FactExtras& x) { return std::to_string(x.extraction_failures); });
        extra("Errors", [](const FactExtras& x) { return std::to_string(x.errors); });
    }
    std::vector<std::size_t> width(grid.front().size(), 0);
    for (const auto& line : grid)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::string out = std::string(table_title(t)) + "\n";
    for (const auto& line : grid) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i == 0) out += fmt::format("{:<{}}", line[i], width[i]);
            else out += fmt::format("  {:>{}}", line[i], width[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace

std::string format_text(const RunReport& report) {
    std::string out;
    for (TableKind t : {TableKind::DirectAnswers, TableKind::SupportPairs, TableKind::FactPairs}) {
        auto s = format_table(report, t);
        if (s.empty()) continue;
        if (!out.empty()) out += '\n';
        out += s;
    }
    return out;
}

nlohmann::json to_json(const RunReport& report) {
    nlohmann::json j;
    j["kind"] = report.kind == ExperimentKind::Verification ? "verification" : "facts";
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [k, c] : report.counts) {
        nlohmann::json cell = {{"cell", k.str()}, {"table", to_string(k.table)}, {"column", k.column}, {"row", k.row},
                               {"count", c}};
        if (auto p = report.percent(k)) cell["percent"] = p->str();
        cells.push_back(std::move(cell));
    }
    j["cells"] = std::move(cells);
    if (!report.fact_extras.empty()) {
        nlohmann::json extras = nlohmann::json::object();
        for (const auto& [col, x] : report.fact_extras) {
            extras[col] = {{"questions", x.questions},
                           {"with_statements", x.with_statements},
                           {"extraction_failures", x.extraction_failures},
                           {"errors", x.errors},
                           {"length_anomalies", x.length_anomalies},
                           {"no_evidence", x.no_evidence},
                           {"avg_supported_per_query", x.avg_supported.str()},
                           {"avg_contradictory_per_query", x.avg_contradictory.str()},
                           {"avg_neither_per_query", x.avg_neither.str()},
                           {"fully_supported", x.fully_supported},
                           {"fully_supported_percent", x.fully_supported_pct.str()},
                           {"none_supported", x.none_supported},
                           {"none_supported_percent", x.none_supported_pct.str()},
                           {"none_contradictory", x.none_contradictory},
                           {"none_contradictory_percent", x.none_contradictory_pct.str()}};
        }
        j["fact_extras"] = std::move(extras);
    }
    return j;
}

}  // namespace verifact::reporting
