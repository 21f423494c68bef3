#include "verifact/llm/parsers.hpp"

#include <cctype>

#include "verifact/error.hpp"

namespace verifact::llm {
namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Drops leading whitespace, punctuation and markdown ("**", "#", quotes, ...).
std::string_view skip_decoration(std::string_view s) {
    while (!s.empty() && !is_alnum(s.front()) && static_cast<unsigned char>(s.front()) < 0x80) s.remove_prefix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

struct Lead {
    std::string word;        // lowercased leading word
    std::string_view rest;   // text after it
};

Lead leading_word(std::string_view raw) {
    std::string_view s = skip_decoration(raw);
    std::size_t n = 0;
    while (n < s.size() && std::isalpha(static_cast<unsigned char>(s[n]))) ++n;
    return {lower(s.substr(0, n)), s.substr(n)};
}

std::string explanation_from(std::string_view rest) {
    return std::string(trim(skip_decoration(rest)));
}

}  // namespace

std::string_view to_string(YesNo v) noexcept { return v == YesNo::Yes ? "Yes" : "No"; }

std::string_view to_string(Scn v) noexcept {
    switch (v) {
    case Scn::Supported: return "Supported";
    case Scn::Contradictory: return "Contradictory";
    case Scn::Neither: return "Neither";
    }
    return "?";
}

YesNoVerdict parse_yes_no(std::string_view raw) {
    Lead lead = leading_word(raw);
    if (lead.word == "yes") return {YesNo::Yes, explanation_from(lead.rest)};
    if (lead.word == "no") return {YesNo::No, explanation_from(lead.rest)};
    throw UnparseableResponse(std::string(raw));
}

ScnVerdict parse_scn(std::string_view raw) {
    Lead lead = leading_word(raw);
    if (lead.word == "supported") return {Scn::Supported, explanation_from(lead.rest)};
    if (lead.word == "contradictory") return {Scn::Contradictory, explanation_from(lead.rest)};
    if (lead.word == "neither") return {Scn::Neither, explanation_from(lead.rest)};
    throw UnparseableResponse(std::string(raw));
}

std::vector<std::string> parse_statement_list(std::string_view raw) {
    static constexpr std::string_view kBullet = "\xE2\x80\xA2";  // U+2022
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t end = raw.find('\n', pos);
        if (end == std::string_view::npos) end = raw.size();
        std::string_view line = trim(raw.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty()) continue;

        if (line.substr(0, kBullet.size()) == kBullet) {
            line.remove_prefix(kBullet.size());
        } else if (line.front() == '-' || line.front() == '*') {
            line.remove_prefix(1);
        } else if (std::isdigit(static_cast<unsigned char>(line.front()))) {
            std::size_t d = 0;
            while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
            if (d < line.size() && (line[d] == '.' || line[d] == ')') &&
                (d + 1 == line.size() || std::isspace(static_cast<unsigned char>(line[d + 1]))))
                line.remove_prefix(d + 1);
        }
        line = trim(line);
        if (!line.empty()) out.emplace_back(line);
    }
    return out;
}

bool is_no_answer(std::string_view raw) {
    std::string head = lower(skip_decoration(raw).substr(0, 9));
    if (head != "no answer") return false;
    std::string_view s = skip_decoration(raw);
    return s.size() == 9 || !is_alnum(s[9]);
}

}  // namespace verifact::llm
