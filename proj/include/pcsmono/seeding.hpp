#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace pcsmono {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable child seed: folds `path` into `root` one element at a time.
inline std::uint64_t derive_seed(std::uint64_t root, std::span<const int> path) {
    std::uint64_t h = splitmix64(root);
    for (int v : path) h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<int> path) {
    return derive_seed(root, std::span<const int>(path.begin(), path.size()));
}

}  // namespace pcsmono
