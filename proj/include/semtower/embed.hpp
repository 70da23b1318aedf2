#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace semtower {

using EmbeddingVector = std::vector<double>;

enum class EmbedderKind { reference, remote };

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::reference;
    std::size_t dim = 1024;
    std::string endpoint;    // required for remote
    std::string model_name;  // informational only

    void validate() const;  // throws Error on an inconsistent config
};

// Deterministic, dependency-free test embedder. Hashes byte trigrams of the
// ASCII-lowercased text with 64-bit FNV-1a (offset 14695981039346656037,
// prime 1099511628211) into dim buckets; the hash's top bit picks the sign
// of each count. The counts are then L2-normalized. Texts shorter than
// three bytes hash as a single gram; empty text yields the zero vector.
EmbeddingVector reference_embed(const std::string& text, std::size_t dim);

// Embeds via the configured backend. Remote wire format:
//   POST { "input": [string, ...] } -> { "embeddings": [[float, ...], ...] }
// Dimension of every returned vector is checked against config.dim.
EmbeddingVector embed(const std::string& text, const EmbedderConfig& config);
std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbedderConfig& config);

// dot(a,b) / (|a||b|), clamped to [-1,1]; 0 if either norm is zero.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

double l2_norm(const EmbeddingVector& v);

}  // namespace semtower
