#include "semtower/tower.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "semtower/errors.hpp"

namespace semtower {

SemanticTower::SemanticTower(std::string domain, std::size_t dim,
                             std::vector<TowerEntry> entries)
    : domain_(std::move(domain)), dim_(dim), entries_(std::move(entries)) {
    if (entries_.empty()) throw Error("tower has no entries");
    if (dim_ == 0) throw Error("tower dim must be positive");

    std::unordered_set<std::string> labels;
    for (const auto& e : entries_) {
        if (e.type_label.empty()) throw Error("tower entry has an empty label");
        if (!labels.insert(e.type_label).second) {
            throw Error("duplicate type label: " + e.type_label);
        }
        if (e.vector.size() != dim_) throw DimensionMismatchError(dim_, e.vector.size());
    }

    matrix_.resize(entries_.size() * dim_);
    norms_.resize(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        std::copy(entries_[i].vector.begin(), entries_[i].vector.end(),
                  matrix_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        norms_[i] = l2_norm(entries_[i].vector);
    }
}

SemanticTower build_tower(const std::string& domain,
                          const std::vector<PrimitiveList>& primitive_lists,
                          const EmbedderConfig& embedder) {
    if (primitive_lists.empty()) throw Error("build_tower: no primitive lists given");

    std::vector<std::string> texts;
    texts.reserve(primitive_lists.size());
    for (const auto& p : primitive_lists) texts.push_back(primitives_to_text(p));

    auto vectors = embed_batch(texts, embedder);

    std::vector<TowerEntry> entries;
    entries.reserve(primitive_lists.size());
    for (std::size_t i = 0; i < primitive_lists.size(); ++i) {
        entries.push_back({primitive_lists[i].type_label, std::move(texts[i]),
                           std::move(vectors[i])});
    }
    return SemanticTower(domain, embedder.dim, std::move(entries));
}

std::vector<TowerMatch> search_top_k(const SemanticTower& t, const EmbeddingVector& query,
                                     std::size_t k) {
    if (k == 0) throw Error("search_top_k: k must be >= 1");
    if (query.size() != t.dim()) throw DimensionMismatchError(t.dim(), query.size());

    const std::size_t n = t.size();
    const std::size_t dim = t.dim();

    double q_sq = 0.0;
    for (double x : query) q_sq += x * x;
    const double q_norm = std::sqrt(q_sq);

    std::vector<double> scores(n);
    const double* q = query.data();
#pragma omp parallel for schedule(static) if (n * dim > 16384)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const double* row = t.row(static_cast<std::size_t>(i));
        double dot = 0.0;
        for (std::size_t j = 0; j < dim; ++j) dot += q[j] * row[j];
        const double e_norm = t.row_norm(static_cast<std::size_t>(i));
        scores[i] = (q_norm == 0.0 || e_norm == 0.0)
                        ? 0.0
                        : std::clamp(dot / (q_norm * e_norm), -1.0, 1.0);
    }

    const std::size_t m = std::min(k, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& entries = t.entries();
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m),
                      order.end(), [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return entries[a].type_label < entries[b].type_label;
                      });

    std::vector<TowerMatch> matches;
    matches.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        matches.push_back({entries[order[i]].type_label, scores[order[i]]});
    }
    return matches;
}

std::vector<TowerMatch> scan_top_k(const SemanticTower& t, const EmbeddingVector& query,
                                   std::size_t k) {
    if (k == 0) throw Error("scan_top_k: k must be >= 1");
    if (query.size() != t.dim()) throw DimensionMismatchError(t.dim(), query.size());

    std::vector<TowerMatch> all;
    all.reserve(t.size());
    for (const auto& e : t.entries()) {
        all.push_back({e.type_label, cosine(query, e.vector)});
    }
    std::sort(all.begin(), all.end(), [](const TowerMatch& a, const TowerMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.type_label < b.type_label;
    });
    all.resize(std::min(k, all.size()));
    return all;
}

void save_tower(const SemanticTower& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open tower file for writing: " + path);

    nlohmann::ordered_json header;
    header["domain"] = t.domain();
    header["dim"] = t.dim();
    header["version"] = 1;
    out << header.dump() << '\n';

    for (const auto& e : t.entries()) {
        nlohmann::ordered_json line;
        line["label"] = e.type_label;
        line["primitives"] = e.primitives_text;
        line["vector"] = e.vector;
        out << line.dump() << '\n';
    }
    if (!out) throw IoError("write failed for tower file: " + path);
}

SemanticTower load_tower(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open tower file: " + path);

    auto fail = [&](std::size_t lineno, const std::string& msg) -> ParseError {
        return ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    std::string line;
    if (!std::getline(in, line)) throw fail(1, "missing header line");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw fail(1, std::string("malformed header: ") + e.what());
    }
    if (!header.is_object() || !header.contains("domain") || !header.contains("dim") ||
        !header.contains("version")) {
        throw fail(1, "header must carry domain, dim and version");
    }
    if (header["version"] != 1) throw fail(1, "unsupported tower version");
    if (!header["dim"].is_number_unsigned() || header["dim"].get<std::size_t>() == 0) {
        throw fail(1, "dim must be a positive integer");
    }
    const auto dim = header["dim"].get<std::size_t>();

    std::vector<TowerEntry> entries;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw fail(lineno, std::string("malformed entry: ") + e.what());
        }
        if (!obj.is_object() || !obj.contains("label") || !obj.contains("primitives") ||
            !obj.contains("vector") || !obj["label"].is_string() ||
            !obj["primitives"].is_string() || !obj["vector"].is_array()) {
            throw fail(lineno, "entry must carry label, primitives and vector");
        }
        if (obj["vector"].size() != dim) {
            throw fail(lineno, "vector length " + std::to_string(obj["vector"].size()) +
                                   " does not match tower dim " + std::to_string(dim));
        }
        TowerEntry e;
        e.type_label = obj["label"].get<std::string>();
        e.primitives_text = obj["primitives"].get<std::string>();
        e.vector.reserve(dim);
        for (const auto& x : obj["vector"]) {
            if (!x.is_number()) throw fail(lineno, "vector component is not a number");
            e.vector.push_back(x.get<double>());
        }
        entries.push_back(std::move(e));
    }

    return SemanticTower(header["domain"].get<std::string>(), dim, std::move(entries));
}

}  // namespace semtower
