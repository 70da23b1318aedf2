#include "semtower/ingest.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fnv.hpp"
#include "http_util.hpp"
#include "semtower/errors.hpp"

namespace fs = std::filesystem;

namespace semtower {

namespace {

const std::set<std::string>& known_properties() {
    static const std::set<std::string> props = {"subclass",   "instance", "part",
                                                "represents", "category", "description"};
    return props;
}

std::string truncate_fragment(const std::string& s) {
    return s.size() <= 200 ? s : s.substr(0, 200) + "...";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sparql_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

std::string url_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

// Wikidata property ids per semantic-set property name. The entity is
// located by its English label; override the templates for QID lookups.
std::string builtin_template(const std::string& property) {
    if (property == "description") {
        return "SELECT ?value WHERE { ?type rdfs:label \"{{TYPE_LABEL}}\"@en . "
               "?type schema:description ?value . FILTER (LANG(?value) = \"en\") } LIMIT 100";
    }
    std::string pid;
    if (property == "subclass") pid = "P279";
    else if (property == "instance") pid = "P31";
    else if (property == "part") pid = "P361";
    else if (property == "represents") pid = "P1269";
    else pid = "P910";  // category
    return "SELECT ?value WHERE { ?type rdfs:label \"{{TYPE_LABEL}}\"@en . "
           "?type wdt:" + pid + " ?v . ?v rdfs:label ?value . "
           "FILTER (LANG(?value) = \"en\") } LIMIT 100";
}

std::string render_query(const std::string& property, const SparqlQuerySpec& spec,
                         const FetchOptions& options) {
    std::string tmpl;
    if (options.template_dir.empty()) {
        tmpl = builtin_template(property);
    } else {
        tmpl = read_file(options.template_dir + "/" + property + ".rq");
    }
    tmpl = replace_all(tmpl, "{{TYPE_LABEL}}", sparql_escape(spec.term_type));
    if (tmpl.find("{{TYPE_QID}}") != std::string::npos) {
        auto it = options.qid_map.find(spec.term_type);
        if (it == options.qid_map.end()) {
            throw Error("SPARQL template for '" + property + "' needs {{TYPE_QID}} but the QID map has no entry for '" +
                        spec.term_type + "'");
        }
        tmpl = replace_all(tmpl, "{{TYPE_QID}}", it->second);
    }
    return tmpl;
}

std::string cache_file_path(const std::string& cache_dir, const std::string& term_type,
                            const std::string& property) {
    std::string sanitized;
    for (char c : term_type) {
        sanitized += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    }
    char hex[9];
    std::snprintf(hex, sizeof(hex), "%08x",
                  static_cast<unsigned>(detail::fnv1a64(term_type.data(), term_type.size()) &
                                        0xFFFFFFFFu));
    return cache_dir + "/" + sanitized + "-" + hex + "__" + property + ".json";
}

std::vector<std::string> parse_sparql_results(const std::string& body,
                                              const std::string& context) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(context + ": response is not JSON (" + std::string(e.what()) +
                         "): " + truncate_fragment(body));
    }
    if (!j.is_object() || !j.contains("results") || !j["results"].is_object() ||
        !j["results"].contains("bindings") || !j["results"]["bindings"].is_array()) {
        throw ParseError(context + ": response lacks results.bindings: " +
                         truncate_fragment(body));
    }

    std::string var = "value";
    if (j.contains("head") && j["head"].is_object() && j["head"].contains("vars") &&
        j["head"]["vars"].is_array() && !j["head"]["vars"].empty() &&
        j["head"]["vars"][0].is_string()) {
        var = j["head"]["vars"][0].get<std::string>();
    }

    std::vector<std::string> values;
    for (const auto& binding : j["results"]["bindings"]) {
        if (!binding.is_object()) {
            throw ParseError(context + ": binding is not an object: " +
                             truncate_fragment(binding.dump()));
        }
        if (!binding.contains(var)) continue;  // unbound variable
        const auto& cell = binding[var];
        if (!cell.is_object() || !cell.contains("value") || !cell["value"].is_string()) {
            throw ParseError(context + ": binding cell lacks a string value: " +
                             truncate_fragment(cell.dump()));
        }
        values.push_back(cell["value"].get<std::string>());
    }
    return values;
}

void write_cache_file(const std::string& path, const std::string& body) {
    fs::create_directories(fs::path(path).parent_path());
    // write to a temp file then rename, so concurrent readers never see a
    // half-written entry
    const std::string tmp = path + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write cache file: " + tmp);
        out << body;
        if (!out) throw IoError("write failed for cache file: " + tmp);
    }
    fs::rename(tmp, path);
}

std::string path_stem(const std::string& path) { return fs::path(path).stem().string(); }

}  // namespace

void SparqlQuerySpec::validate() const {
    if (term_type.empty()) throw Error("SPARQL query spec: term_type is empty");
    if (properties.empty()) throw Error("SPARQL query spec: no properties listed");
    std::set<std::string> seen;
    for (const auto& p : properties) {
        if (known_properties().count(p) == 0) {
            throw Error("SPARQL query spec: unknown property '" + p + "'");
        }
        if (!seen.insert(p).second) {
            throw Error("SPARQL query spec: duplicate property '" + p + "'");
        }
    }
}

SemanticSet fetch_semantic_set(const SparqlQuerySpec& spec, const FetchOptions& options) {
    spec.validate();

    SemanticSet set;
    set.type_label = spec.term_type;
    for (const auto& property : spec.properties) {
        std::string body;
        std::string cache_path;
        if (!options.cache_dir.empty()) {
            cache_path = cache_file_path(options.cache_dir, spec.term_type, property);
        }

        if (!cache_path.empty() && fs::exists(cache_path)) {
            body = read_file(cache_path);
        } else if (options.offline) {
            throw TransportError(spec.endpoint.empty() ? "(offline)" : spec.endpoint,
                                 "offline mode and no cached response for term type '" +
                                     spec.term_type + "' property '" + property + "'");
        } else {
            if (spec.endpoint.empty()) {
                throw TransportError("(unset)", "no SPARQL endpoint configured");
            }
            const std::string query = render_query(property, spec, options);
            const auto url = detail::split_url(spec.endpoint);
            httplib::Client client(url.base);
            client.set_connection_timeout(15);
            client.set_read_timeout(120);
            client.set_follow_location(true);
            const std::string full =
                url.path + "?query=" + url_encode(query) + "&format=json";
            httplib::Headers headers = {{"Accept", "application/sparql-results+json"},
                                        {"User-Agent", "semtower/1.0"}};
            auto res = client.Get(full, headers);
            if (!res) throw TransportError(spec.endpoint, httplib::to_string(res.error()));
            if (res->status != 200) {
                throw TransportError(spec.endpoint,
                                     "HTTP status " + std::to_string(res->status));
            }
            body = res->body;
            if (!cache_path.empty()) write_cache_file(cache_path, body);
        }

        set.values.emplace_back(
            property, parse_sparql_results(body, spec.term_type + "/" + property));
    }
    return set;
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset: " + path);

    Dataset d;
    d.name = path_stem(path);

    auto add_record = [&](TermRecord&& r) {
        if (r.gold_type &&
            std::find(d.type_inventory.begin(), d.type_inventory.end(), *r.gold_type) ==
                d.type_inventory.end()) {
            d.type_inventory.push_back(*r.gold_type);
        }
        d.records.push_back(std::move(r));
    };

    std::string line;
    std::size_t lineno = 0;

    if (format == DatasetFormat::jsonl) {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            nlohmann::json row;
            try {
                row = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": malformed JSON (" +
                                 e.what() + ")");
            }
            if (!row.is_object()) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": row is not a JSON object");
            }
            if (!row.contains("term") || !row["term"].is_string() ||
                row["term"].get<std::string>().empty()) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": missing or empty 'term'");
            }
            TermRecord r;
            r.term = row["term"].get<std::string>();
            if (row.contains("id")) {
                if (row["id"].is_string()) r.id = row["id"].get<std::string>();
                else if (row["id"].is_number_integer())
                    r.id = std::to_string(row["id"].get<long long>());
                else
                    throw ParseError(path + ":" + std::to_string(lineno) +
                                     ": 'id' must be a string or integer");
            } else {
                r.id = "row-" + std::to_string(lineno);
            }
            if (row.contains("sentence") && row["sentence"].is_string() &&
                !row["sentence"].get<std::string>().empty()) {
                r.sentence = row["sentence"].get<std::string>();
            }
            if (row.contains("type") && row["type"].is_string() &&
                !row["type"].get<std::string>().empty()) {
                r.gold_type = row["type"].get<std::string>();
            }
            add_record(std::move(r));
        }
    } else {
        // TSV: header line names the columns; "term" is required.
        std::vector<std::string> header;
        std::unordered_map<std::string, std::size_t> col;
        auto split_tabs = [](const std::string& s) {
            std::vector<std::string> fields;
            std::size_t start = 0;
            while (true) {
                const auto tab = s.find('\t', start);
                if (tab == std::string::npos) {
                    fields.push_back(s.substr(start));
                    break;
                }
                fields.push_back(s.substr(start, tab - start));
                start = tab + 1;
            }
            if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
                fields.back().pop_back();
            }
            return fields;
        };
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            auto fields = split_tabs(line);
            if (header.empty()) {
                header = fields;
                for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
                if (col.count("term") == 0) {
                    throw ParseError(path + ":" + std::to_string(lineno) +
                                     ": TSV header lacks a 'term' column");
                }
                continue;
            }
            if (fields.size() > header.size()) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": row has " +
                                 std::to_string(fields.size()) + " fields but the header names " +
                                 std::to_string(header.size()));
            }
            auto field = [&](const std::string& name) -> std::string {
                auto it = col.find(name);
                if (it == col.end() || it->second >= fields.size()) return "";
                return fields[it->second];
            };
            TermRecord r;
            r.term = field("term");
            if (r.term.empty()) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": missing or empty 'term'");
            }
            r.id = field("id").empty() ? "row-" + std::to_string(lineno) : field("id");
            if (!field("sentence").empty()) r.sentence = field("sentence");
            if (!field("type").empty()) r.gold_type = field("type");
            add_record(std::move(r));
        }
    }

    if (d.records.empty()) throw ParseError(path + ": dataset has no records");
    return d;
}

void save_dataset(const Dataset& d, const std::string& path, DatasetFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open dataset file for writing: " + path);

    if (format == DatasetFormat::jsonl) {
        for (const auto& r : d.records) {
            nlohmann::ordered_json row;
            row["id"] = r.id;
            row["term"] = r.term;
            if (r.sentence) row["sentence"] = *r.sentence;
            if (r.gold_type) row["type"] = *r.gold_type;
            out << row.dump() << '\n';
        }
    } else {
        out << "id\tterm\tsentence\ttype\n";
        for (const auto& r : d.records) {
            for (const std::string* s :
                 {&r.id, &r.term, r.sentence ? &*r.sentence : nullptr,
                  r.gold_type ? &*r.gold_type : nullptr}) {
                if (s && s->find_first_of("\t\n") != std::string::npos) {
                    throw IoError("TSV output cannot represent a value containing a tab or "
                                  "newline (record " + r.id + ")");
                }
            }
            out << r.id << '\t' << r.term << '\t' << (r.sentence ? *r.sentence : "") << '\t'
                << (r.gold_type ? *r.gold_type : "") << '\n';
        }
    }
    if (!out) throw IoError("write failed for dataset file: " + path);
}

DatasetFormat dataset_format_from_path(const std::string& path) {
    return fs::path(path).extension() == ".tsv" ? DatasetFormat::tsv : DatasetFormat::jsonl;
}

DatasetStats dataset_stats(const Dataset& d) {
    DatasetStats stats;
    stats.n_records = d.records.size();
    stats.n_types = d.type_inventory.size();
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& r : d.records) {
        if (r.gold_type) ++counts[*r.gold_type];
    }
    for (const auto& label : d.type_inventory) {
        stats.per_type.emplace_back(label, counts[label]);
    }
    return stats;
}

std::map<std::string, std::string> load_qid_map(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": malformed QID map (" + std::string(e.what()) + ")");
    }
    if (!j.is_object()) throw ParseError(path + ": QID map must be a JSON object");
    std::map<std::string, std::string> map;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) throw ParseError(path + ": QID for '" + k + "' is not a string");
        map[k] = v.get<std::string>();
    }
    return map;
}

void save_semantic_sets(const std::string& domain, const std::vector<SemanticSet>& sets,
                        const std::string& path) {
    nlohmann::ordered_json doc;
    doc["domain"] = domain;
    doc["sets"] = nlohmann::ordered_json::array();
    for (const auto& s : sets) {
        nlohmann::ordered_json entry;
        entry["type"] = s.type_label;
        entry["values"] = nlohmann::ordered_json::array();
        for (const auto& [property, values] : s.values) {
            entry["values"].push_back({{"property", property}, {"values", values}});
        }
        doc["sets"].push_back(std::move(entry));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open sets file for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for sets file: " + path);
}

std::pair<std::string, std::vector<SemanticSet>> load_semantic_sets(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": malformed sets file (" + std::string(e.what()) + ")");
    }
    if (!doc.is_object() || !doc.contains("domain") || !doc["domain"].is_string() ||
        !doc.contains("sets") || !doc["sets"].is_array()) {
        throw ParseError(path + ": sets file must carry 'domain' and a 'sets' array");
    }
    std::vector<SemanticSet> sets;
    for (const auto& entry : doc["sets"]) {
        if (!entry.is_object() || !entry.contains("type") || !entry["type"].is_string() ||
            !entry.contains("values") || !entry["values"].is_array()) {
            throw ParseError(path + ": set entry must carry 'type' and a 'values' array");
        }
        SemanticSet s;
        s.type_label = entry["type"].get<std::string>();
        for (const auto& pv : entry["values"]) {
            if (!pv.is_object() || !pv.contains("property") || !pv["property"].is_string() ||
                !pv.contains("values") || !pv["values"].is_array()) {
                throw ParseError(path + ": property entry must carry 'property' and 'values'");
            }
            std::vector<std::string> values;
            for (const auto& v : pv["values"]) {
                if (!v.is_string()) {
                    throw ParseError(path + ": property value is not a string");
                }
                values.push_back(v.get<std::string>());
            }
            s.values.emplace_back(pv["property"].get<std::string>(), std::move(values));
        }
        sets.push_back(std::move(s));
    }
    return {doc["domain"].get<std::string>(), std::move(sets)};
}

}  // namespace semtower
