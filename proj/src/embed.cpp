#include "semtower/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fnv.hpp"
#include "http_util.hpp"
#include "semtower/errors.hpp"

namespace semtower {

namespace {

std::string truncate_fragment(const std::string& s) {
    return s.size() <= 200 ? s : s.substr(0, 200) + "...";
}

std::vector<EmbeddingVector> remote_embed_batch(const std::vector<std::string>& texts,
                                                const EmbedderConfig& config) {
    const auto url = detail::split_url(config.endpoint);
    httplib::Client client(url.base);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);

    nlohmann::json request;
    request["input"] = texts;
    auto res = client.Post(url.path, request.dump(), "application/json");
    if (!res) {
        throw TransportError(config.endpoint, httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw TransportError(config.endpoint, "HTTP status " + std::to_string(res->status));
    }

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("embedder reply is not JSON (" + std::string(e.what()) +
                         "): " + truncate_fragment(res->body));
    }
    if (!reply.contains("embeddings") || !reply["embeddings"].is_array() ||
        reply["embeddings"].size() != texts.size()) {
        throw ParseError("embedder reply missing 'embeddings' array of size " +
                         std::to_string(texts.size()) + ": " + truncate_fragment(res->body));
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& row : reply["embeddings"]) {
        if (!row.is_array()) {
            throw ParseError("embedder reply row is not an array: " +
                             truncate_fragment(row.dump()));
        }
        if (row.size() != config.dim) {
            throw DimensionMismatchError(config.dim, row.size());
        }
        EmbeddingVector v;
        v.reserve(config.dim);
        for (const auto& x : row) {
            if (!x.is_number()) {
                throw ParseError("embedder reply contains a non-numeric component: " +
                                 truncate_fragment(row.dump()));
            }
            v.push_back(x.get<double>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

void EmbedderConfig::validate() const {
    if (dim == 0) throw Error("embedder dim must be positive");
    if (kind == EmbedderKind::remote && endpoint.empty()) {
        throw Error("remote embedder requires an endpoint");
    }
}

EmbeddingVector reference_embed(const std::string& text, std::size_t dim) {
    if (dim == 0) throw Error("reference_embed: dim must be >= 1");
    EmbeddingVector counts(dim, 0.0);
    std::string lowered = text;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    if (lowered.empty()) return counts;

    auto add_gram = [&](const char* p, std::size_t n) {
        const std::uint64_t h = detail::fnv1a64(p, n);
        const double sign = (h & 0x8000000000000000ULL) ? -1.0 : 1.0;
        counts[h % dim] += sign;
    };
    if (lowered.size() < 3) {
        add_gram(lowered.data(), lowered.size());
    } else {
        for (std::size_t i = 0; i + 3 <= lowered.size(); ++i) add_gram(lowered.data() + i, 3);
    }

    double norm_sq = 0.0;
    for (double c : counts) norm_sq += c * c;
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
        for (double& c : counts) c /= norm;
    }
    return counts;
}

EmbeddingVector embed(const std::string& text, const EmbedderConfig& config) {
    config.validate();
    if (config.kind == EmbedderKind::reference) return reference_embed(text, config.dim);
    return remote_embed_batch({text}, config).front();
}

std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbedderConfig& config) {
    config.validate();
    if (config.kind == EmbedderKind::reference) {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(reference_embed(t, config.dim));
        return out;
    }
    if (texts.empty()) return {};
    return remote_embed_batch(texts, config);
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) throw DimensionMismatchError(a.size(), b.size());
    double dot = 0.0, na_sq = 0.0, nb_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na_sq += a[i] * a[i];
        nb_sq += b[i] * b[i];
    }
    const double na = std::sqrt(na_sq);
    const double nb = std::sqrt(nb_sq);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double l2_norm(const EmbeddingVector& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    return std::sqrt(sq);
}

}  // namespace semtower
