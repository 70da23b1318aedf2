#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semtower/embed.hpp"
#include "semtower/ingest.hpp"
#include "semtower/tower.hpp"

namespace semtower {

enum class PromptMode { baseline, rag };

// Prompt text with {X} (term), {Y} (type list) and, in rag mode, {Z}
// (retrieved hint) placeholders.
struct PromptTemplate {
    PromptMode mode;
    std::string text;

    static PromptTemplate baseline();
    static PromptTemplate rag();

    void validate() const;
};

enum class LlmKind { echo_hint, scripted, remote };

struct LlmConfig {
    LlmKind kind = LlmKind::echo_hint;
    std::string endpoint;                        // required for remote
    std::map<std::string, std::string> script;   // term -> answer, for scripted

    void validate() const;
};

struct Prediction {
    std::string id;
    std::string term;
    std::string predicted_type;
    std::optional<std::string> hint;
    std::string raw_answer;
};

// Exact placeholder substitution; Y renders as a comma-separated list in
// inventory order. Rag mode requires a hint.
std::string compose_prompt(const PromptTemplate& tmpl, const std::string& term,
                           const std::vector<std::string>& types,
                           const std::optional<std::string>& hint);

// Embeds the term (concatenated with its sentence when one exists) and
// returns the tower's top-1 match.
TowerMatch retrieve_hint(const SemanticTower& tower, const std::string& term,
                         const std::optional<std::string>& sentence,
                         const EmbedderConfig& embedder);

// Maps a raw model answer onto the type inventory: exact match after
// trimming and case-folding, then earliest whole-word occurrence (ties by
// inventory order), then the fallback when it names an inventory type,
// then the first type. Always returns a member of types.
std::string parse_answer(const std::string& raw, const std::vector<std::string>& types,
                         const std::optional<std::string>& fallback);

// One call to the configured model. echo_hint answers the hint verbatim;
// scripted looks the term up in its map; remote posts
// {"prompt": string} and expects {"answer": string}.
std::string llm_answer(const LlmConfig& cfg, const std::string& prompt,
                       const std::string& term, const std::optional<std::string>& hint);

// Full pipeline for one record: retrieve (rag only), compose, query the
// model, parse. In rag mode the hint doubles as the parse fallback.
Prediction type_term(const TermRecord& record, PromptMode mode, const SemanticTower* tower,
                     const LlmConfig& llm, const EmbedderConfig& embedder,
                     const std::vector<std::string>& types);

}  // namespace semtower
