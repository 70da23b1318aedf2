#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "semtower/ingest.hpp"

namespace semtower {

struct CurationPolicy {
    std::size_t rare_threshold = 100;  // categories below this keep every record
    std::size_t cap = 25;              // others keep their first `cap` records

    void validate() const;
};

// Keeps all records of categories with fewer than rare_threshold instances
// and the first `cap` records (in dataset order) of every other category.
// Original relative order is preserved and every category survives.
Dataset curate_subset(const Dataset& d, const CurationPolicy& policy);

// Seeded uniform split into (train, val); train gets
// floor(train_fraction * |records|) records. Both halves preserve dataset
// order. The shuffle is a hand-rolled Fisher-Yates over mt19937_64 so the
// same seed gives the same split on every platform.
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction,
                                  std::uint64_t seed);

}  // namespace semtower
