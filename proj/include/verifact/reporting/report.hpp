#pragma once

#include <compare>
#include <cstdint>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "verifact/pipeline/records.hpp"
#include "verifact/pipeline/run_log.hpp"

namespace verifact::reporting {

enum class TableKind { DirectAnswers, SupportPairs, FactPairs };
std::string_view to_string(TableKind t) noexcept;  // "direct", "support", "fact"

/// One table cell: column is the answer type or retriever, row the verdict label.
/// Written as "table:column:row", e.g. "support:bm25:Yes".
struct CellKey {
    TableKind table = TableKind::SupportPairs;
    std::string column;
    std::string row;

    std::string str() const;
    /// Throws Error on a malformed key.
    static CellKey parse(std::string_view s);
    auto operator<=>(const CellKey&) const = default;
};

/// A percentage held as integer hundredths.
struct Percent {
    std::int64_t hundredths = 0;
    std::string str() const;  // "92.02"
    double value() const noexcept { return static_cast<double>(hundredths) / 100.0; }
    auto operator<=>(const Percent&) const = default;
};

/// count / total, half-up to two decimals, exact. Throws Error when total is 0.
Percent percent_of(std::uint64_t count, std::uint64_t total);
/// Mean of fractions, half-up to two decimals.
Percent mean_percent(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& fractions);

struct FactExtras {
    std::uint64_t questions = 0;
    std::uint64_t with_statements = 0;
    std::uint64_t extraction_failures = 0;
    std::uint64_t errors = 0;
    std::uint64_t length_anomalies = 0;
    std::uint64_t no_evidence = 0;
    Percent avg_supported, avg_contradictory, avg_neither;
    std::uint64_t fully_supported = 0, none_supported = 0, none_contradictory = 0;
    Percent fully_supported_pct, none_supported_pct, none_contradictory_pct;
};

enum class ExperimentKind { Verification, Facts };

struct RunReport {
    ExperimentKind kind = ExperimentKind::Verification;
    std::map<CellKey, std::uint64_t> counts;
    std::map<CellKey, Percent> percents;
    std::map<std::string, FactExtras> fact_extras;  // by retriever

    std::uint64_t count(const CellKey& key) const;
    std::optional<Percent> percent(const CellKey& key) const;
    /// Columns present for `table`, in display order.
    std::vector<std::string> columns(TableKind table) const;
    std::vector<std::string> rows(TableKind table) const;
};

/// Pure fold over the records; record order never changes the result.
RunReport tabulate(const std::vector<pipeline::VerificationRecord>& records);
RunReport tabulate(const std::vector<pipeline::FactRecord>& facts,
                   const std::vector<pipeline::AttributedAnswer>& answers);
/// Throws Error when the log mixes both experiments or is empty.
RunReport tabulate(const pipeline::RunLogContents& log);

std::string format_text(const RunReport& report);
nlohmann::json to_json(const RunReport& report);

}  // namespace verifact::reporting
