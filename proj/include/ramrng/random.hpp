#pragma once

#include <cstdint>
#include <random>

#include "ramrng/bits.hpp"

namespace ramrng {

/// SplitMix64 finalizer, used only to spread seeds across streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic substream derivation: distinct (seed, stream) pairs give
/// independent-looking engines, so trials can run in any order.
inline std::mt19937_64 derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// Uniform double in [0, 1) with 53 random bits. Avoids the
/// platform-dependent std:: distributions so replays are bit-identical.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(std::mt19937_64& eng, double p) {
    return uniform01(eng) < p;
}

/// n uniform random bits, consumed MSB-first from successive engine outputs.
inline BitVec random_bits(std::mt19937_64& eng, std::size_t n) {
    BitVec v;
    v.reserve(n);
    std::size_t produced = 0;
    while (produced < n) {
        std::uint64_t w = eng();
        for (unsigned i = 64; i-- > 0 && produced < n; ++produced) v.push_back((w >> i) & 1u);
    }
    return v;
}

/// Deterministically expand a bit string to `n` bits by seeding a generator
/// from its contents. Used where an accounting model credits more bits than
/// the literal extractor emits.
inline BitVec expand_bits(const BitVec& src, std::size_t n) {
    std::seed_seq seq(src.bytes().begin(), src.bytes().end());
    std::mt19937_64 eng(0);
    eng.seed(seq);
    return random_bits(eng, n);
}

}  // namespace ramrng
