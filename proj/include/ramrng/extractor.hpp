#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "ramrng/bits.hpp"
#include "ramrng/errors.hpp"
#include "ramrng/sram_model.hpp"

namespace ramrng {

/// Observed entropy rate of uninitialized RAM, in bits per bit.
inline constexpr double kDefaultEntropyDensity = 0.103;

/// Parameters of the PH universal hash as used by the harvest pipeline.
/// Each invocation consumes 4 * pairs = 32 words (16 message + 16 key),
/// i.e. 32 * word_bits input bits, and emits a (2 * word_bits + 5)-bit value.
struct PhConfig {
    unsigned word_bits = 16;  // supported widths: 16 and 64
    unsigned pairs = 8;

    unsigned words_per_hash() const { return 4 * pairs; }
    unsigned input_bits_per_hash() const { return words_per_hash() * word_bits; }
    unsigned output_bits() const { return 2 * word_bits + 5; }
};

inline void validate(const PhConfig& cfg) {
    if (cfg.word_bits != 16 && cfg.word_bits != 64)
        throw ConstraintError("PhConfig: word_bits must be 16 or 64");
    if (cfg.pairs != 8) throw ConstraintError("PhConfig: pairs is fixed at 8");
}

/// One hash value together with its nominal width (2w + 5 bits).
struct HashOutput {
    WideUint value;
    unsigned width_bits;
};

/// PH over 8 word pairs: sum over i of (m[2i] + k[2i]) * (m[2i+1] + k[2i+1]),
/// in exact integer arithmetic (no modular reduction), which is what makes
/// the result fit 2w + 5 bits rather than 2w.
///
/// `word_bits` may be any width in [1, 64]; the pipeline configs restrict
/// themselves to 16 and 64 but reduced widths are valid (and exhaustively
/// checkable).
inline HashOutput ph_hash(std::span<const std::uint64_t> msg, std::span<const std::uint64_t> key,
                          unsigned word_bits) {
    if (word_bits < 1 || word_bits > 64) throw ConstraintError("ph_hash: word_bits must be in [1, 64]");
    if (msg.size() != 16 || key.size() != 16)
        throw ArityError("ph_hash: expected exactly 16 message and 16 key words");

    const std::uint64_t limit_mask =
        word_bits == 64 ? ~0ULL : ((std::uint64_t{1} << word_bits) - 1);
    for (std::uint64_t w : msg)
        if (w & ~limit_mask) throw BoundsError("ph_hash: message word out of range");
    for (std::uint64_t w : key)
        if (w & ~limit_mask) throw BoundsError("ph_hash: key word out of range");

    WideUint sum = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        const WideUint a = WideUint(msg[2 * i]) + key[2 * i];
        const WideUint b = WideUint(msg[2 * i + 1]) + key[2 * i + 1];
        sum += a * b;
    }
    return HashOutput{sum, 2 * word_bits + 5};
}

inline HashOutput ph_hash(std::span<const std::uint64_t> msg, std::span<const std::uint64_t> key,
                          const PhConfig& cfg) {
    validate(cfg);
    return ph_hash(msg, key, cfg.word_bits);
}

/// Expected extractable entropy of a memory region: floor(bytes * 8 * density).
inline long long entropy_capacity(long long free_bytes, double density) {
    if (free_bytes < 0) throw BoundsError("entropy_capacity: free_bytes must be >= 0");
    if (!(density >= 0.0 && density <= 1.0))
        throw BoundsError("entropy_capacity: density must be in [0, 1]");
    return static_cast<long long>(std::floor(static_cast<double>(free_bytes) * 8.0 * density));
}

/// Result of one extraction pass.
struct HarvestReport {
    BitVec bits;                       // concatenated hash outputs, MSB-first
    long long source_bytes = 0;        // memory handed to the extractor
    int chunks = 0;                    // PH invocations
    long long entropy_capacity_bits = 0;
    long long extractor_yield_bits = 0;
    long long discarded_bits = 0;      // trailing input short of a full chunk
};

/// Split `memory` into consecutive 32w-bit chunks; in each chunk the first 16
/// words are the message and the next 16 the key. Every chunk contributes its
/// (2w + 5)-bit hash, zero-padded to full width, concatenated MSB-first.
/// Trailing bits short of a chunk are discarded and reported.
inline HarvestReport extract_all(const BitVec& memory, const PhConfig& cfg,
                                 double density = kDefaultEntropyDensity) {
    validate(cfg);
    const std::size_t chunk_bits = cfg.input_bits_per_hash();
    if (memory.size() < chunk_bits)
        throw InsufficientInputError("extract_all: memory is shorter than one hash block");

    HarvestReport rep;
    rep.chunks = static_cast<int>(memory.size() / chunk_bits);
    rep.source_bytes = static_cast<long long>(memory.size() / 8);
    rep.discarded_bits = static_cast<long long>(memory.size() - rep.chunks * chunk_bits);
    rep.entropy_capacity_bits = entropy_capacity(rep.source_bytes, density);

    std::uint64_t words[32];
    for (int c = 0; c < rep.chunks; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * chunk_bits;
        for (unsigned j = 0; j < 32; ++j)
            words[j] = memory.word(base + j * cfg.word_bits, cfg.word_bits);
        const HashOutput h =
            ph_hash(std::span<const std::uint64_t>(words, 16),
                    std::span<const std::uint64_t>(words + 16, 16), cfg.word_bits);
        rep.bits.append_uint(h.value, h.width_bits);
    }
    rep.extractor_yield_bits = static_cast<long long>(rep.bits.size());
    return rep;
}

/// Read the tag's free region (everything past the firmware-reserved bytes)
/// and extract. Memory is left untouched, so repeated harvests without a
/// power cycle return identical bits.
inline HarvestReport harvest(const TagState& tag, const PhConfig& cfg) {
    validate(cfg);
    if (!tag.powered) throw PowerStateError("harvest: tag is not powered");
    const std::size_t offset = static_cast<std::size_t>(tag.spec.reserved_bytes) * 8;
    const std::size_t len = static_cast<std::size_t>(tag.spec.free_bytes()) * 8;
    if (len < cfg.input_bits_per_hash())
        throw InsufficientInputError("harvest: free region is shorter than one hash block");
    const BitVec region = read_bits(tag, offset, len);
    return extract_all(region, cfg, tag.spec.noisy_fraction);
}

}  // namespace ramrng
