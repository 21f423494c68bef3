#include "verifact/reporting/audit.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "verifact/error.hpp"
#include "verifact/hash.hpp"

namespace verifact::reporting {

using nlohmann::json;
using pipeline::FactRecord;
using pipeline::GateStatus;
using pipeline::VerificationRecord;

json to_json(const SampleRef& s) {
    return {{"cell", s.cell.str()}, {"qid", s.qid}, {"statement_index", s.statement_index},
            {"content_hash", s.content_hash}};
}

SampleRef sample_from_json(const json& j) {
    try {
        return {CellKey::parse(j.at("cell").get<std::string>()), j.at("qid").get<QueryId>(),
                j.value("statement_index", std::size_t{0}), j.at("content_hash").get<std::string>()};
    } catch (const json::exception& e) {
        throw Error(std::string("bad sample line: ") + e.what());
    }
}

std::string content_hash(const VerificationRecord& r, TableKind table) {
    json j = {{"qid", r.qid}, {"question", r.question}, {"answer", r.generated_answer}, {"table", to_string(table)}};
    if (table == TableKind::DirectAnswers) {
        j["gate_generated"] = {pipeline::to_string(r.gate_generated.status), r.gate_generated.explanation};
    } else {
        j["mode"] = pipeline::to_string(r.mode);
        j["evidence"] = r.evidence_text;
        j["pids"] = r.evidence_pids;
        j["verdict"] = pipeline::to_string(r.verdict);
        j["gate_evidence"] = {pipeline::to_string(r.gate_evidence.status), r.gate_evidence.explanation};
        j["support"] = {pipeline::to_string(r.support.status), r.support.explanation};
    }
    return sha256_hex(j.dump());
}

std::string content_hash(const FactRecord& f) {
    json j = {{"qid", f.qid},
              {"index", f.index},
              {"retriever", f.retriever},
              {"statement", f.statement},
              {"evidence", f.evidence_text},
              {"verdict", pipeline::to_string(f.verdict)},
              {"explanation", f.explanation}};
    return sha256_hex(j.dump());
}

namespace {

struct Located {
    const VerificationRecord* verification = nullptr;
    const FactRecord* fact = nullptr;
};

// Records in `cell` keyed by (qid, statement index).
std::map<std::pair<QueryId, std::size_t>, Located> members(const pipeline::RunLogContents& log, const CellKey& cell) {
    std::map<std::pair<QueryId, std::size_t>, Located> out;
    switch (cell.table) {
    case TableKind::DirectAnswers:
        for (const auto& r : log.verifications) {
            const auto& gate = cell.column == "generated" ? r.gate_generated : r.gate_evidence;
            if (cell.column != "generated" && pipeline::to_string(r.mode) != cell.column) continue;
            if (gate.status == GateStatus::Skipped || pipeline::to_string(gate.status) != cell.row) continue;
            out.emplace(std::pair{r.qid, std::size_t{0}}, Located{&r, nullptr});
        }
        break;
    case TableKind::SupportPairs:
        for (const auto& r : log.verifications)
            if (pipeline::to_string(r.mode) == cell.column && pipeline::to_string(r.verdict) == cell.row)
                out.emplace(std::pair{r.qid, std::size_t{0}}, Located{&r, nullptr});
        break;
    case TableKind::FactPairs:
        for (const auto& f : log.facts)
            if (f.retriever == cell.column && pipeline::to_string(f.verdict) == cell.row)
                out.emplace(std::pair{f.qid, f.index}, Located{nullptr, &f});
        break;
    }
    return out;
}

Located locate(const pipeline::RunLogContents& log, const SampleRef& s) {
    auto m = members(log, s.cell);
    auto it = m.find({s.qid, s.statement_index});
    if (it == m.end())
        throw NotFoundError("sample qid " + std::to_string(s.qid) + " not in cell " + s.cell.str());
    return it->second;
}

}  // namespace

std::vector<SampleRef> cell_population(const pipeline::RunLogContents& log, const CellKey& cell) {
    std::vector<SampleRef> out;
    for (const auto& [key, loc] : members(log, cell)) {
        SampleRef s{cell, key.first, key.second, {}};
        s.content_hash = loc.fact ? content_hash(*loc.fact) : content_hash(*loc.verification, cell.table);
        out.push_back(std::move(s));
    }
    return out;
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw Error("bounded draw with zero bound");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    for (;;) {
        std::uint64_t x = rng();
        if (x < limit) return x % bound;
    }
}

std::vector<SampleRef> sample_cell(const pipeline::RunLogContents& log, const CellKey& cell, std::size_t n,
                                   std::uint64_t seed) {
    auto pop = cell_population(log, cell);
    if (pop.empty()) throw Error("cell " + cell.str() + " is empty");
    std::mt19937_64 rng(seed);
    std::size_t take = std::min(n, pop.size());
    // partial Fisher-Yates: the first `take` slots are the sample
    for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded_draw(rng, pop.size() - i));
        std::swap(pop[i], pop[j]);
    }
    pop.resize(take);
    return pop;
}

std::string_view to_string(Opinion o) noexcept {
    return o == Opinion::Correct ? "Correct" : "Incorrect";
}

json to_json(const AuditLabel& l) {
    return {{"content_hash", l.content_hash}, {"cell", l.cell},         {"qid", l.qid},
            {"statement_index", l.statement_index}, {"labeller", l.labeller}, {"opinion", to_string(l.opinion)},
            {"note", l.note},                 {"timestamp", l.timestamp}};
}

AuditLabel audit_label_from_json(const json& j) {
    try {
        AuditLabel l;
        l.content_hash = j.at("content_hash").get<std::string>();
        l.cell = j.at("cell").get<std::string>();
        l.qid = j.at("qid").get<QueryId>();
        l.statement_index = j.value("statement_index", std::size_t{0});
        l.labeller = j.at("labeller").get<std::string>();
        auto op = j.at("opinion").get<std::string>();
        if (op == "Correct") l.opinion = Opinion::Correct;
        else if (op == "Incorrect") l.opinion = Opinion::Incorrect;
        else throw Error("bad opinion '" + op + "'");
        l.note = j.value("note", "");
        l.timestamp = j.value("timestamp", "");
        return l;
    } catch (const json::exception& e) {
        throw Error(std::string("bad audit label: ") + e.what());
    }
}

std::vector<AuditLabel> read_audit_file(const std::filesystem::path& path) {
    std::vector<AuditLabel> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(audit_label_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError(path.string(), n, e.what());
        }
    }
    return out;
}

std::string render_sample(const pipeline::RunLogContents& log, const SampleRef& s) {
    Located loc = locate(log, s);
    std::ostringstream o;
    o << "cell:      " << s.cell.str() << "\n";
    if (loc.fact) {
        const auto& f = *loc.fact;
        auto q = std::find_if(log.answers.begin(), log.answers.end(),
                              [&](const auto& a) { return a.qid == f.qid && a.retriever == f.retriever; });
        o << "question:  " << (q != log.answers.end() ? q->question : std::string("?")) << "\n";
        o << "statement: " << f.statement << "\n";
        o << "evidence:  " << f.evidence_text << "\n";
        o << "verdict:   " << pipeline::to_string(f.verdict) << "\n";
        o << "reason:    " << f.explanation << "\n";
        if (f.post_edit) o << "post-edit: " << *f.post_edit << "\n";
    } else {
        const auto& r = *loc.verification;
        o << "question:  " << r.question << "\n";
        o << "answer:    " << r.generated_answer << "\n";
        if (s.cell.table == TableKind::DirectAnswers && s.cell.column == "generated") {
            o << "verdict:   " << pipeline::to_string(r.gate_generated.status) << "\n";
            o << "reason:    " << r.gate_generated.explanation << "\n";
        } else {
            o << "evidence:  " << r.evidence_text << "\n";
            const auto& g = s.cell.table == TableKind::DirectAnswers ? r.gate_evidence : r.support;
            o << "verdict:   " << (s.cell.table == TableKind::DirectAnswers ? pipeline::to_string(g.status)
                                                                              : pipeline::to_string(r.verdict))
              << "\n";
            o << "reason:    " << g.explanation << "\n";
        }
    }
    return o.str();
}

namespace {

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::vector<AuditLabel> label_session(const pipeline::RunLogContents& log, const std::vector<SampleRef>& samples,
                                      const std::filesystem::path& audit_path, const std::string& labeller,
                                      std::istream& in, std::ostream& out) {
    std::set<std::string> done;
    std::vector<AuditLabel> prior;
    for (auto& l : read_audit_file(audit_path)) {
        if (l.labeller != labeller) continue;
        done.insert(l.content_hash);
        prior.push_back(std::move(l));
    }
    if (audit_path.has_parent_path()) std::filesystem::create_directories(audit_path.parent_path());
    std::ofstream file(audit_path, std::ios::app);
    if (!file) throw Error("cannot open audit file " + audit_path.string());

    std::vector<AuditLabel> added;
    std::size_t shown = 0, total = samples.size();
    for (const auto& s : samples) {
        ++shown;
        if (done.count(s.content_hash)) continue;
        out << fmt::format("[{}/{}]\n", shown, total) << render_sample(log, s)
            << "(c)orrect / (i)ncorrect [note], (s)kip, (q)uit > " << std::flush;
        std::string line;
        bool quit = false;
        for (;;) {
            if (!std::getline(in, line)) {
                quit = true;
                break;
            }
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(line[b])));
            std::string note;
            auto rest = line.find_first_not_of(" \t\r", line.find_first_of(" \t", b) == std::string::npos
                                                             ? line.size()
                                                             : line.find_first_of(" \t", b));
            if (rest != std::string::npos) note = line.substr(rest);
            while (!note.empty() && (note.back() == '\r' || note.back() == ' ')) note.pop_back();
            if (c == 'q') {
                quit = true;
                break;
            }
            if (c == 's') break;
            if (c == 'c' || c == 'i') {
                AuditLabel l{s.content_hash, s.cell.str(), s.qid, s.statement_index, labeller,
                             c == 'c' ? Opinion::Correct : Opinion::Incorrect, note, utc_now()};
                file << to_json(l).dump() << '\n' << std::flush;
                done.insert(l.content_hash);
                added.push_back(std::move(l));
                break;
            }
            out << "enter c, i, s or q > " << std::flush;
        }
        out << "\n";
        if (quit) break;
    }

    std::set<std::string> wanted;
    for (const auto& s : samples) wanted.insert(s.content_hash);
    std::uint64_t correct = 0, labelled = 0;
    for (const auto* group : {&prior, &added})
        for (const auto& l : *group)
            if (wanted.count(l.content_hash)) {
                ++labelled;
                if (l.opinion == Opinion::Correct) ++correct;
            }
    out << fmt::format("labelled {}/{}; correct {}/{}", labelled, total, correct, labelled);
    if (labelled > 0) out << " (" << percent_of(correct, labelled).str() << "%)";
    out << "\n";
    return added;
}

std::vector<AgreementRow> agreement_report(const std::vector<AuditLabel>& labels) {
    std::map<std::string, AgreementRow> rows;
    for (const auto& l : labels) {
        auto& r = rows[l.cell];
        r.cell = l.cell;
        if (l.opinion == Opinion::Correct) ++r.correct;
        else ++r.incorrect;
    }
    std::vector<AgreementRow> out;
    for (auto& [_, r] : rows) {
        r.accuracy = percent_of(r.correct, r.correct + r.incorrect);
        out.push_back(r);
    }
    return out;
}

std::string format_agreement(const std::vector<AgreementRow>& rows) {
    std::size_t w = 4;
    for (const auto& r : rows) w = std::max(w, r.cell.size());
    std::string out = fmt::format("{:<{}}  {:>7}  {:>9}  {:>8}\n", "cell", w, "Correct", "Incorrect", "Accuracy");
    for (const auto& r : rows)
        out += fmt::format("{:<{}}  {:>7}  {:>9}  {:>7}%\n", r.cell, w, r.correct, r.incorrect, r.accuracy.str());
    return out;
}

}  // namespace verifact::reporting
