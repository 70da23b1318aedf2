#include "semtower/curate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "semtower/errors.hpp"

namespace semtower {

void CurationPolicy::validate() const {
    if (rare_threshold == 0) throw Error("curation policy: rare_threshold must be positive");
    if (cap == 0) throw Error("curation policy: cap must be positive");
    if (cap > rare_threshold) {
        throw Error("curation policy: cap (" + std::to_string(cap) +
                    ") must not exceed rare_threshold (" + std::to_string(rare_threshold) + ")");
    }
}

Dataset curate_subset(const Dataset& d, const CurationPolicy& policy) {
    policy.validate();

    std::unordered_map<std::string, std::size_t> cat_len;
    for (const auto& r : d.records) {
        if (!r.gold_type) throw Error("curate_subset: record '" + r.id + "' has no type label");
        ++cat_len[*r.gold_type];
    }

    Dataset out;
    out.name = d.name;
    std::unordered_map<std::string, std::size_t> kept;
    for (const auto& r : d.records) {
        const auto total = cat_len[*r.gold_type];
        if (total >= policy.rare_threshold && kept[*r.gold_type] >= policy.cap) continue;
        ++kept[*r.gold_type];
        if (std::find(out.type_inventory.begin(), out.type_inventory.end(), *r.gold_type) ==
            out.type_inventory.end()) {
            out.type_inventory.push_back(*r.gold_type);
        }
        out.records.push_back(r);
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction,
                                  std::uint64_t seed) {
    const std::size_t n = d.records.size();
    if (n < 2) throw Error("split: dataset must have at least 2 records");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("split: train_fraction must lie in (0, 1)");
    }
    const auto train_n =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
    if (train_n == 0 || train_n == n) {
        throw Error("split: degenerate partition (train would hold " +
                    std::to_string(train_n) + " of " + std::to_string(n) + " records)");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(order[i], order[j]);
    }

    std::vector<std::size_t> train_idx(order.begin(),
                                       order.begin() + static_cast<std::ptrdiff_t>(train_n));
    std::vector<std::size_t> val_idx(order.begin() + static_cast<std::ptrdiff_t>(train_n),
                                     order.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());

    auto take = [&](const std::vector<std::size_t>& idx, const std::string& suffix) {
        Dataset part;
        part.name = d.name + suffix;
        for (std::size_t i : idx) {
            const auto& r = d.records[i];
            if (r.gold_type &&
                std::find(part.type_inventory.begin(), part.type_inventory.end(),
                          *r.gold_type) == part.type_inventory.end()) {
                part.type_inventory.push_back(*r.gold_type);
            }
            part.records.push_back(r);
        }
        return part;
    };
    return {take(train_idx, ".train"), take(val_idx, ".val")};
}

}  // namespace semtower
