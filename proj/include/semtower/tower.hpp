#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "semtower/embed.hpp"
#include "semtower/normalize.hpp"

namespace semtower {

struct TowerEntry {
    std::string type_label;
    std::string primitives_text;  // comma-separated primitives
    EmbeddingVector vector;
};

struct TowerMatch {
    std::string type_label;
    double score;  // cosine, in [-1, 1]
};

// One embedded entry per term type. Immutable after construction; the
// contiguous row matrix and precomputed norms back the accelerated search.
class SemanticTower {
public:
    // Validates labels (non-empty, unique) and per-entry dimensions,
    // then builds the index. Throws on an empty entry list.
    SemanticTower(std::string domain, std::size_t dim, std::vector<TowerEntry> entries);

    const std::string& domain() const { return domain_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<TowerEntry>& entries() const { return entries_; }

    const double* row(std::size_t i) const { return matrix_.data() + i * dim_; }
    double row_norm(std::size_t i) const { return norms_[i]; }

private:
    std::string domain_;
    std::size_t dim_;
    std::vector<TowerEntry> entries_;
    std::vector<double> matrix_;  // row-major copy of entry vectors
    std::vector<double> norms_;
};

// Embeds primitives_to_text of every list and assembles the tower.
// Duplicate type labels are rejected by name; embedder failures propagate.
SemanticTower build_tower(const std::string& domain,
                          const std::vector<PrimitiveList>& primitive_lists,
                          const EmbedderConfig& embedder);

// Exact top-k by cosine, descending score, ties broken by ascending label.
// Runs on the contiguous index, parallelized over entries; results are
// identical to the serial reference scan below.
std::vector<TowerMatch> search_top_k(const SemanticTower& t, const EmbeddingVector& query,
                                     std::size_t k);

// Serial reference: straight cosine against every stored entry vector,
// no index. Kept for testing and benchmark comparison.
std::vector<TowerMatch> scan_top_k(const SemanticTower& t, const EmbeddingVector& query,
                                   std::size_t k);

// JSON Lines file. Line 1: {"domain": s, "dim": n, "version": 1}; one
// {"label": s, "primitives": s, "vector": [floats]} object per entry.
// UTF-8, LF line endings; floats round-trip bit-exactly.
void save_tower(const SemanticTower& t, const std::string& path);
SemanticTower load_tower(const std::string& path);

}  // namespace semtower
