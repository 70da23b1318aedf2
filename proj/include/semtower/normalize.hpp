#pragma once

#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace semtower {

// Raw property values for one term type, in property order
// (e.g. subclass, instance, part, represents|category, description).
struct SemanticSet {
    std::string type_label;
    std::vector<std::pair<std::string, std::vector<std::string>>> values;
};

// Cleaned, deduplicated, lowercase tokens describing one term type.
struct PrimitiveList {
    std::string type_label;
    std::vector<std::string> primitives;
};

using StopwordSet = std::unordered_set<std::string>;

// Splits text into maximal runs of word characters; everything else is a
// separator. Word characters are ASCII alphanumerics plus any non-ASCII
// codepoint outside the common Unicode punctuation/space blocks (no ICU;
// accented letters tokenize correctly, exotic symbols may pass through).
// Invalid UTF-8 bytes act as separators.
std::vector<std::string> tokenize(const std::string& text);

// Lowercases every token (ASCII folding) and drops those found in
// stopwords. Order preserved. Stopword entries must already be lowercase.
std::vector<std::string> clean_tokens(const std::vector<std::string>& tokens,
                                      const StopwordSet& stopwords);

// tokenize + clean_tokens over every property value in map order, then
// prunes empties and duplicates keeping the first occurrence.
PrimitiveList build_primitives(const SemanticSet& set, const StopwordSet& stopwords);

// Comma-separated rendering; empty list yields "".
std::string primitives_to_text(const PrimitiveList& p);

// One lowercase word per line, UTF-8, '#' starts a comment. Entries are
// folded to lowercase on load.
StopwordSet load_stopword_file(const std::string& path);

// Canonical property orders for the two shipped domains.
const std::vector<std::string>& wordnet_properties();
const std::vector<std::string>& geonames_properties();

}  // namespace semtower
