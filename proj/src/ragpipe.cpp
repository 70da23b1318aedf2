#include "semtower/ragpipe.hpp"

#include <algorithm>
#include <cctype>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "semtower/errors.hpp"

namespace semtower {

namespace {

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Earliest position where needle occurs in haystack with non-word
// characters (or edges) on both sides; npos when absent.
std::size_t find_whole_word(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return std::string::npos;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

std::string remote_llm_answer(const LlmConfig& cfg, const std::string& prompt) {
    const auto url = detail::split_url(cfg.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(10);
    client.set_read_timeout(300);

    nlohmann::json request;
    request["prompt"] = prompt;
    auto res = client.Post(url.path, request.dump(), "application/json");
    if (!res) throw TransportError(cfg.endpoint, httplib::to_string(res.error()));
    if (res->status != 200) {
        throw TransportError(cfg.endpoint, "HTTP status " + std::to_string(res->status));
    }
    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model reply is not JSON (" + std::string(e.what()) + ")");
    }
    if (!reply.is_object() || !reply.contains("answer") || !reply["answer"].is_string()) {
        throw ParseError("model reply lacks a string 'answer' field");
    }
    return reply["answer"].get<std::string>();
}

}  // namespace

PromptTemplate PromptTemplate::baseline() {
    return {PromptMode::baseline,
            "Give the entity for the term {X}. Select the answer from this list {Y}"};
}

PromptTemplate PromptTemplate::rag() {
    return {PromptMode::rag,
            "Give the entity for the term {X}. Select the answer from this list {Y} "
            "relying on the search result {Z}"};
}

void PromptTemplate::validate() const {
    const bool has_x = text.find("{X}") != std::string::npos;
    const bool has_y = text.find("{Y}") != std::string::npos;
    const bool has_z = text.find("{Z}") != std::string::npos;
    if (mode == PromptMode::baseline) {
        if (!has_x || !has_y || has_z) {
            throw Error("baseline template must contain {X} and {Y} and no {Z}");
        }
    } else {
        if (!has_x || !has_y || !has_z) {
            throw Error("rag template must contain {X}, {Y} and {Z}");
        }
    }
}

void LlmConfig::validate() const {
    if (kind == LlmKind::remote && endpoint.empty()) {
        throw Error("remote LLM requires an endpoint");
    }
}

std::string compose_prompt(const PromptTemplate& tmpl, const std::string& term,
                           const std::vector<std::string>& types,
                           const std::optional<std::string>& hint) {
    tmpl.validate();
    if (tmpl.mode == PromptMode::rag && !hint) {
        throw Error("rag prompt requires a retrieval hint");
    }
    std::string type_list;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i > 0) type_list += ", ";
        type_list += types[i];
    }

    // Single pass over the template so substituted values are never
    // rescanned for placeholders.
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.text.size()) {
        if (tmpl.text.compare(i, 3, "{X}") == 0) {
            out += term;
            i += 3;
        } else if (tmpl.text.compare(i, 3, "{Y}") == 0) {
            out += type_list;
            i += 3;
        } else if (hint && tmpl.text.compare(i, 3, "{Z}") == 0) {
            out += *hint;
            i += 3;
        } else {
            out += tmpl.text[i++];
        }
    }
    return out;
}

TowerMatch retrieve_hint(const SemanticTower& tower, const std::string& term,
                         const std::optional<std::string>& sentence,
                         const EmbedderConfig& embedder) {
    const std::string query_text = sentence ? term + " " + *sentence : term;
    const auto query = embed(query_text, embedder);
    return search_top_k(tower, query, 1).front();
}

std::string parse_answer(const std::string& raw, const std::vector<std::string>& types,
                         const std::optional<std::string>& fallback) {
    if (types.empty()) throw Error("parse_answer: empty type inventory");

    const std::string folded = ascii_lower(trim(raw));
    for (const auto& t : types) {
        if (folded == ascii_lower(t)) return t;
    }

    const std::string lowered_raw = ascii_lower(raw);
    std::size_t best_pos = std::string::npos;
    const std::string* best_type = nullptr;
    for (const auto& t : types) {
        const auto pos = find_whole_word(lowered_raw, ascii_lower(t));
        if (pos != std::string::npos && (best_type == nullptr || pos < best_pos)) {
            best_pos = pos;
            best_type = &t;
        }
    }
    if (best_type) return *best_type;

    if (fallback) {
        const std::string wanted = ascii_lower(trim(*fallback));
        for (const auto& t : types) {
            if (wanted == ascii_lower(t)) return t;
        }
    }
    return types.front();
}

std::string llm_answer(const LlmConfig& cfg, const std::string& prompt,
                       const std::string& term, const std::optional<std::string>& hint) {
    cfg.validate();
    switch (cfg.kind) {
        case LlmKind::echo_hint:
            return hint.value_or("");
        case LlmKind::scripted: {
            auto it = cfg.script.find(term);
            return it == cfg.script.end() ? "" : it->second;
        }
        case LlmKind::remote:
            return remote_llm_answer(cfg, prompt);
    }
    throw Error("unreachable LLM kind");
}

Prediction type_term(const TermRecord& record, PromptMode mode, const SemanticTower* tower,
                     const LlmConfig& llm, const EmbedderConfig& embedder,
                     const std::vector<std::string>& types) {
    std::optional<std::string> hint;
    if (mode == PromptMode::rag) {
        if (tower == nullptr) throw Error("rag mode requires a semantic tower");
        hint = retrieve_hint(*tower, record.term, record.sentence, embedder).type_label;
    }

    const auto tmpl =
        mode == PromptMode::rag ? PromptTemplate::rag() : PromptTemplate::baseline();
    const std::string prompt = compose_prompt(tmpl, record.term, types, hint);
    const std::string raw = llm_answer(llm, prompt, record.term, hint);
    const std::string predicted =
        parse_answer(raw, types, mode == PromptMode::rag ? hint : std::nullopt);

    return {record.id, record.term, predicted, hint, raw};
}

}  // namespace semtower
