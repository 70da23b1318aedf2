#include "semtower/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "semtower/errors.hpp"

namespace semtower {

namespace {

bool is_unicode_punct(char32_t cp) {
    // Common punctuation/space blocks; everything else non-ASCII counts as
    // a word character.
    return (cp >= 0x00A0 && cp <= 0x00BF) ||  // Latin-1 punctuation/symbols
           cp == 0x00D7 || cp == 0x00F7 ||    // multiplication/division signs
           (cp >= 0x2000 && cp <= 0x206F) ||  // general punctuation
           (cp >= 0x2E00 && cp <= 0x2E7F) ||  // supplemental punctuation
           (cp >= 0x3000 && cp <= 0x303F) ||  // CJK symbols and punctuation
           (cp >= 0xFE30 && cp <= 0xFE4F) ||  // CJK compatibility forms
           (cp >= 0xFF00 && cp <= 0xFF0F) ||  // fullwidth punctuation
           (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
           (cp >= 0xFF5B && cp <= 0xFF65);
}

// Decodes one UTF-8 sequence starting at i. Returns its byte length and
// writes the codepoint; returns 0 on malformed input.
std::size_t decode_utf8(const std::string& s, std::size_t i, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    for (std::size_t j = 1; j < len; ++j) {
        const auto b = static_cast<unsigned char>(s[i + j]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    return len;
}

std::string ascii_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        char32_t cp = 0;
        const std::size_t len = decode_utf8(text, i, cp);
        bool word_char;
        if (len == 0) {
            word_char = false;  // malformed byte: separator
        } else if (cp < 0x80) {
            word_char = std::isalnum(static_cast<unsigned char>(cp)) != 0;
        } else {
            word_char = !is_unicode_punct(cp);
        }
        if (word_char) {
            current.append(text, i, len);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
        i += (len == 0) ? 1 : len;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> clean_tokens(const std::vector<std::string>& tokens,
                                      const StopwordSet& stopwords) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        std::string lowered = ascii_lower(tok);
        if (stopwords.count(lowered) == 0) out.push_back(std::move(lowered));
    }
    return out;
}

PrimitiveList build_primitives(const SemanticSet& set, const StopwordSet& stopwords) {
    PrimitiveList result;
    result.type_label = set.type_label;
    std::unordered_set<std::string> seen;
    for (const auto& [property, raw_values] : set.values) {
        (void)property;
        for (const auto& raw : raw_values) {
            for (auto& tok : clean_tokens(tokenize(raw), stopwords)) {
                if (tok.empty()) continue;
                if (seen.insert(tok).second) result.primitives.push_back(std::move(tok));
            }
        }
    }
    return result;
}

std::string primitives_to_text(const PrimitiveList& p) {
    std::string out;
    for (std::size_t i = 0; i < p.primitives.size(); ++i) {
        if (i > 0) out += ", ";
        out += p.primitives[i];
    }
    return out;
}

StopwordSet load_stopword_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path);
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r\n");
        words.insert(ascii_lower(line.substr(first, last - first + 1)));
    }
    return words;
}

const std::vector<std::string>& wordnet_properties() {
    static const std::vector<std::string> props = {"subclass", "instance", "part",
                                                   "represents", "description"};
    return props;
}

const std::vector<std::string>& geonames_properties() {
    static const std::vector<std::string> props = {"subclass", "instance", "part",
                                                   "category", "description"};
    return props;
}

}  // namespace semtower
