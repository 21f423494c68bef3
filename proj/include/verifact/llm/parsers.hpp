#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace verifact::llm {

enum class YesNo { Yes, No };
enum class Scn { Supported, Contradictory, Neither };

std::string_view to_string(YesNo v) noexcept;
std::string_view to_string(Scn v) noexcept;

struct YesNoVerdict {
    YesNo label;
    std::string explanation;
    bool operator==(const YesNoVerdict&) const = default;
};

struct ScnVerdict {
    Scn label;
    std::string explanation;
    bool operator==(const ScnVerdict&) const = default;
};

// All parsers are pure functions of the raw reply text.

/// Leading "yes"/"no" word, case-insensitive, after skipping punctuation and markdown.
/// Throws UnparseableResponse otherwise.
YesNoVerdict parse_yes_no(std::string_view raw);

/// Leading "supported"/"contradictory"/"neither" word, case-insensitive.
/// Throws UnparseableResponse otherwise.
ScnVerdict parse_scn(std::string_view raw);

/// One statement per non-blank line. Leading "-", "*", "•", "N." or "N)" markers are
/// stripped. Never throws; an empty list is a valid result.
std::vector<std::string> parse_statement_list(std::string_view raw);

/// True when the reply leads with "No Answer" (case-insensitive).
bool is_no_answer(std::string_view raw);

}  // namespace verifact::llm
