#pragma once

#include <cstdint>
#include <random>

namespace hocd {

/// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed from a master seed and one or more
/// indices (replicate number, stage tag, ...). Order-sensitive, so
/// derive_seed(s, a, b) != derive_seed(s, b, a) in general.
template <typename... Ks>
std::uint64_t derive_seed(std::uint64_t master, Ks... keys) {
    std::uint64_t s = mix64(master);
    ((s = mix64(s ^ mix64(static_cast<std::uint64_t>(keys)))), ...);
    return s;
}

/// The library-wide generator. All randomized operations take a 64-bit seed
/// and construct one of these, so results are reproducible per seed.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

} // namespace hocd
