#pragma once

// Shared oracles for the test suite. Everything here is computed by a
// different route than the library code it checks.

#include <cstdint>

#include "ramrng/bits.hpp"
#include "ramrng/extractor.hpp"
#include "ramrng/sram_model.hpp"

namespace testsupport {

// Straight-line reference for the product-sum hash, plain uint64 arithmetic.
// Safe for word widths up to 16 (max value ~1.4e11).
inline std::uint64_t ph_reference_small(const std::uint64_t m[16], const std::uint64_t k[16]) {
    std::uint64_t total = 0;
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t left = m[2 * i] + k[2 * i];
        const std::uint64_t right = m[2 * i + 1] + k[2 * i + 1];
        total += left * right;
    }
    return total;
}

inline ramrng::WideUint binom(int n, int k) {
    ramrng::WideUint r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= static_cast<unsigned>(n - k + i);
        r /= static_cast<unsigned>(i);
    }
    return r;
}

inline ramrng::WideUint ipow(ramrng::WideUint base, int e) {
    ramrng::WideUint r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Exact P[Bin(n, num/den) > k], evaluated in integer arithmetic and divided
// once at the end.
inline double binomial_tail_gt(int n, int num, int den, int k) {
    ramrng::WideUint acc = 0;
    for (int j = k + 1; j <= n; ++j)
        acc += binom(n, j) * ipow(num, j) * ipow(den - num, n - j);
    return acc.convert_to<double>() / ipow(den, n).convert_to<double>();
}

inline double binomial_tail_le(int n, int num, int den, int k) {
    ramrng::WideUint acc = 0;
    for (int j = 0; j <= k; ++j)
        acc += binom(n, j) * ipow(num, j) * ipow(den - num, n - j);
    return acc.convert_to<double>() / ipow(den, n).convert_to<double>();
}

// Cold-boot harvest loop collecting the unbiased low 32 bits of each 37-bit
// hash output, until at least min_bits are gathered.
inline ramrng::BitVec extractor_low_bits_stream(std::uint64_t seed, std::size_t min_bits) {
    using namespace ramrng;
    const TagSpec spec;
    const DecayParams decay;
    const PhConfig cfg;
    TagState tag = create_tag(spec, decay, seed);

    BitVec out;
    double t = tag.clock_s;
    while (out.size() < min_bits) {
        power_on(tag, t);
        const HarvestReport rep = harvest(tag, cfg);
        for (int c = 0; c < rep.chunks; ++c)
            out.append(rep.bits.slice(static_cast<std::size_t>(c) * cfg.output_bits() + 5, 32));
        power_off(tag, t);
        t += 60.0;
    }
    return out;
}

}  // namespace testsupport
