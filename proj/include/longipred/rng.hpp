#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace longipred {

using Seed = std::uint64_t;

namespace detail {

// FNV-1a over bytes; stable across platforms so seed derivation is fully specified.
inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Derives an independent seed from a root seed, a stream name and an index.
/// All randomness in the library flows from a single root seed through named
/// sub-streams, so component-level reruns reproduce pipeline-internal results.
inline Seed derive_seed(Seed root, std::string_view stream, std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = detail::fnv1a(h, &root, sizeof(root));
    h = detail::fnv1a(h, stream.data(), stream.size());
    h = detail::fnv1a(h, &index, sizeof(index));
    return detail::splitmix64(h);
}

inline std::mt19937_64 make_rng(Seed root, std::string_view stream, std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(root, stream, index));
}

/// Uniform draw in [0, n) with a fully specified algorithm
/// (std::uniform_int_distribution is implementation-defined).
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection sampling on the top bits; unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace longipred
