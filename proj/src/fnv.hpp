#pragma once

#include <cstddef>
#include <cstdint>

namespace semtower::detail {

// 64-bit FNV-1a; fixed so hashed artifacts are stable across platforms.
inline std::uint64_t fnv1a64(const char* data, std::size_t n) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace semtower::detail
