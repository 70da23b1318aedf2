#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semtower/normalize.hpp"

namespace semtower {

struct TermRecord {
    std::string id;
    std::string term;
    std::optional<std::string> sentence;
    std::optional<std::string> gold_type;
};

struct Dataset {
    std::string name;
    std::vector<TermRecord> records;
    std::vector<std::string> type_inventory;  // distinct gold types, first-appearance order
};

enum class DatasetFormat { jsonl, tsv };

// JSONL rows: {"id"?, "term", "sentence"?, "type"?}; a missing id becomes
// "row-<line>". TSV carries a tab-separated header line naming any of
// id/term/sentence/type; "term" is mandatory. Malformed rows report
// path:line. An empty dataset is an error.
Dataset load_dataset(const std::string& path, DatasetFormat format);
void save_dataset(const Dataset& d, const std::string& path, DatasetFormat format);

// .tsv -> tsv, anything else -> jsonl.
DatasetFormat dataset_format_from_path(const std::string& path);

struct DatasetStats {
    std::size_t n_records = 0;
    std::size_t n_types = 0;
    std::vector<std::pair<std::string, std::size_t>> per_type;  // inventory order
};

DatasetStats dataset_stats(const Dataset& d);

struct SparqlQuerySpec {
    std::string endpoint;
    std::string term_type;
    std::vector<std::string> properties;  // subset of the known property names

    void validate() const;
};

struct FetchOptions {
    std::string cache_dir;     // response cache; "" disables caching
    bool offline = false;      // serve exclusively from the cache
    std::string template_dir;  // per-property .rq files; "" uses built-ins
    std::map<std::string, std::string> qid_map;  // type label -> Wikidata QID
};

// One query per (term_type, property) against the SPARQL endpoint,
// Accept: application/sparql-results+json. Responses cache to disk as
// verbatim bodies keyed by (term_type, property); offline mode reads the
// cache only. Missing matches yield empty value lists.
SemanticSet fetch_semantic_set(const SparqlQuerySpec& spec, const FetchOptions& options);

// JSON object {"type label": "Q...", ...}.
std::map<std::string, std::string> load_qid_map(const std::string& path);

// Semantic-sets file: {"domain": s, "sets": [{"type": s,
// "values": [{"property": s, "values": [s, ...]}, ...]}, ...]}.
void save_semantic_sets(const std::string& domain, const std::vector<SemanticSet>& sets,
                        const std::string& path);
std::pair<std::string, std::vector<SemanticSet>> load_semantic_sets(const std::string& path);

}  // namespace semtower
