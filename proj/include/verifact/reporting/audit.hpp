#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <random>
#include <string>
#include <vector>

#include "verifact/pipeline/run_log.hpp"
#include "verifact/reporting/report.hpp"

namespace verifact::reporting {

/// A sampled record. `statement_index` is meaningful for fact cells only.
struct SampleRef {
    CellKey cell;
    QueryId qid = 0;
    std::size_t statement_index = 0;
    std::string content_hash;
    bool operator==(const SampleRef&) const = default;
};

nlohmann::json to_json(const SampleRef& s);
SampleRef sample_from_json(const nlohmann::json& j);

/// Stable sha256 over the fields a labeller sees (no timings, no raw exchanges).
std::string content_hash(const pipeline::VerificationRecord& r, TableKind table);
std::string content_hash(const pipeline::FactRecord& f);

/// Every record in `cell`, ordered by (qid, statement index).
std::vector<SampleRef> cell_population(const pipeline::RunLogContents& log, const CellKey& cell);

/// Uniform sample of min(n, population) without replacement, deterministic for a seed
/// on every platform. Throws Error for an empty cell.
std::vector<SampleRef> sample_cell(const pipeline::RunLogContents& log, const CellKey& cell, std::size_t n,
                                   std::uint64_t seed);

/// Unbiased draw in [0, bound) from a 64-bit engine.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound);

enum class Opinion { Correct, Incorrect };
std::string_view to_string(Opinion o) noexcept;

struct AuditLabel {
    std::string content_hash;
    std::string cell;
    QueryId qid = 0;
    std::size_t statement_index = 0;
    std::string labeller;
    Opinion opinion = Opinion::Correct;
    std::string note;
    std::string timestamp;  // ISO-8601 UTC
};

nlohmann::json to_json(const AuditLabel& l);
AuditLabel audit_label_from_json(const nlohmann::json& j);
/// Missing file reads as empty.
std::vector<AuditLabel> read_audit_file(const std::filesystem::path& path);

/// Text shown to the labeller for one sample.
std::string render_sample(const pipeline::RunLogContents& log, const SampleRef& sample);

/// Presents each unlabelled sample on `out` and reads one answer per sample from `in`:
/// "c [note]", "i [note]", "s" to skip, "q" to stop. Each label is appended to
/// `audit_path` as soon as it is given. Samples this labeller already labelled are not
/// shown again. Returns the labels added in this session.
std::vector<AuditLabel> label_session(const pipeline::RunLogContents& log, const std::vector<SampleRef>& samples,
                                      const std::filesystem::path& audit_path, const std::string& labeller,
                                      std::istream& in, std::ostream& out);

struct AgreementRow {
    std::string cell;
    std::uint64_t correct = 0;
    std::uint64_t incorrect = 0;
    Percent accuracy;
};

/// Per-cell accuracy; cells with no labels do not appear.
std::vector<AgreementRow> agreement_report(const std::vector<AuditLabel>& labels);
std::string format_agreement(const std::vector<AgreementRow>& rows);

}  // namespace verifact::reporting
