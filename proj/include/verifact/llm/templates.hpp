#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace verifact::llm {

enum class PromptKind { Answer, DirectCheck, SupportCheck, Reader, FactExtract, FactValidate, FactPostEdit };

inline constexpr PromptKind kAllPromptKinds[] = {PromptKind::Answer,      PromptKind::DirectCheck,
                                                 PromptKind::SupportCheck, PromptKind::Reader,
                                                 PromptKind::FactExtract, PromptKind::FactValidate,
                                                 PromptKind::FactPostEdit};

std::string_view to_string(PromptKind kind) noexcept;
std::optional<PromptKind> prompt_kind_from_string(std::string_view name) noexcept;

/// A fixed prompt body with `{name}` placeholders. Placeholder names may contain
/// spaces ("{LLM answer}"); each appears exactly once in its body.
struct PromptTemplate {
    PromptKind kind;
    std::string_view body;
    std::vector<std::string_view> placeholders;
};

const PromptTemplate& prompt_template(PromptKind kind);

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes every placeholder in one pass; bound values are never re-expanded.
/// Throws BindingError naming every missing and every unexpected key.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);
inline std::string render_prompt(PromptKind kind, const Bindings& bindings) {
    return render_prompt(prompt_template(kind), bindings);
}

/// Recovers which template produced `prompt` from its fixed leading text.
std::optional<PromptKind> identify_template(std::string_view prompt);

}  // namespace verifact::llm
