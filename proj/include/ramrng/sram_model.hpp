#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ramrng/bits.hpp"
#include "ramrng/errors.hpp"
#include "ramrng/random.hpp"

namespace ramrng {

/// Per-cell physics. A cell powers up as `1` with probability one_prob; after
/// power loss its stored value survives for decay_time seconds (at reference
/// temperature) and is then lost.
struct CellParams {
    double one_prob = 0.5;
    double decay_time = 20.0;
};

/// Memory geometry and cell population of a simulated tag.
struct TagSpec {
    int total_bytes = 512;       // RAM size
    int reserved_bytes = 136;    // occupied by firmware, never harvested
    int excluded_bytes = 2;      // leading bytes left out of decay analysis
    double noisy_fraction = 0.103;  // cells with one_prob exactly 0.5
    double temperature_c = 20.0;
    // Optional graded-bias mode: when > 0, stable cells draw one_prob from
    // Beta(a, a) instead of {0, 1}. Off by default.
    double beta_bias_alpha = 0.0;

    int total_bits() const { return total_bytes * 8; }
    int free_bytes() const { return total_bytes - reserved_bytes; }
};

/// Logistic remanence model. A cell's decay_time is drawn from
/// Logistic(midpoint_s, slope_s) truncated positive, so the population
/// decayed-fraction curve after t unpowered seconds is
/// 1 / (1 + exp(-(t - midpoint_s) / slope_s)).
struct DecayParams {
    double midpoint_s = 23.5;
    double slope_s = 1.25;
    double temp_ref_c = 20.0;
    double temp_doubling_c = 10.0;   // degrees per halving of decay times
    double midpoint_jitter_s = 2.0;  // per-tag midpoint spread (uniform half-range)
};

inline void validate(const TagSpec& spec) {
    if (spec.total_bytes <= 0) throw ConstraintError("TagSpec: total_bytes must be positive");
    if (spec.reserved_bytes < 0 || spec.excluded_bytes < 0)
        throw ConstraintError("TagSpec: byte counts must be non-negative");
    if (spec.reserved_bytes + spec.excluded_bytes > spec.total_bytes)
        throw ConstraintError("TagSpec: reserved_bytes + excluded_bytes exceeds total_bytes");
    if (!(spec.noisy_fraction >= 0.0 && spec.noisy_fraction <= 1.0))
        throw ConstraintError("TagSpec: noisy_fraction must be in [0, 1]");
    if (!std::isfinite(spec.temperature_c)) throw ConstraintError("TagSpec: bad temperature");
    if (spec.beta_bias_alpha < 0.0 || !std::isfinite(spec.beta_bias_alpha))
        throw ConstraintError("TagSpec: beta_bias_alpha must be >= 0");
}

inline void validate(const DecayParams& d) {
    if (!(d.midpoint_s > 0.0) || !std::isfinite(d.midpoint_s))
        throw ConstraintError("DecayParams: midpoint_s must be positive");
    if (!(d.slope_s > 0.0) || !std::isfinite(d.slope_s))
        throw ConstraintError("DecayParams: slope_s must be positive");
    if (!(d.temp_doubling_c > 0.0)) throw ConstraintError("DecayParams: temp_doubling_c must be positive");
    if (d.midpoint_jitter_s < 0.0 || d.midpoint_s - d.midpoint_jitter_s <= 0.0)
        throw ConstraintError("DecayParams: midpoint jitter keeps the midpoint positive");
}

/// Decay-rate multiplier at `temperature_c`: doubles every temp_doubling_c
/// degrees above the reference. Applied to elapsed unpowered time.
inline double temp_factor(const DecayParams& d, double temperature_c) {
    return std::exp2((temperature_c - d.temp_ref_c) / d.temp_doubling_c);
}

/// Model fraction of cells whose stored value is lost after `elapsed_s`
/// seconds without power at `temperature_c`.
inline double decay_cdf(const DecayParams& d, double elapsed_s, double temperature_c) {
    if (!(elapsed_s >= 0.0)) throw BoundsError("decay_cdf: elapsed_s must be >= 0");
    validate(d);
    const double t = elapsed_s * temp_factor(d, temperature_c);
    return 1.0 / (1.0 + std::exp(-(t - d.midpoint_s) / d.slope_s));
}

/// A simulated tag. Value-semantic: copying captures the full simulation
/// state including the embedded generator, so replays are bit-identical.
struct TagState {
    TagSpec spec;
    DecayParams decay;
    std::vector<CellParams> cells;
    BitVec memory;
    bool powered = false;
    bool ever_powered = false;
    double last_power_off_s = 0.0;
    double clock_s = 0.0;
    std::mt19937_64 rng_state;
};

/// Derive a tag-specific DecayParams from a population base: the midpoint is
/// drawn uniformly from [midpoint_s - jitter, midpoint_s + jitter).
inline DecayParams population_decay(const DecayParams& base, std::uint64_t seed,
                                    std::uint64_t tag_index) {
    validate(base);
    DecayParams d = base;
    auto eng = derive_stream(seed, 0xDECA1000ULL + tag_index);
    d.midpoint_s = base.midpoint_s + base.midpoint_jitter_s * (2.0 * uniform01(eng) - 1.0);
    return d;
}

namespace detail {

/// Logistic(t0, s) sample rejection-sampled to be positive and finite.
inline double sample_decay_time(std::mt19937_64& eng, double t0, double s) {
    for (;;) {
        const double u = uniform01(eng);
        const double t = t0 + s * std::log(u / (1.0 - u));
        if (t > 0.0 && std::isfinite(t)) return t;
    }
}

/// Beta(a, a) via the Johnk/gamma-ratio route; deterministic per build.
inline double sample_beta_symmetric(std::mt19937_64& eng, double a) {
    std::gamma_distribution<double> g(a, 1.0);
    const double x = g(eng);
    const double y = g(eng);
    if (x + y == 0.0) return 0.5;
    return x / (x + y);
}

}  // namespace detail

/// Build an unpowered tag at clock 0. A noisy_fraction of cells (chosen by
/// the seeded generator) get one_prob = 0.5; the rest settle to a fixed
/// power-up value (one_prob 0 or 1, equiprobable). Each cell's decay_time is
/// logistic around the tag's midpoint. Identical (spec, decay, seed) inputs
/// produce bit-identical tags.
inline TagState create_tag(const TagSpec& spec, const DecayParams& decay, std::uint64_t seed) {
    validate(spec);
    validate(decay);

    TagState tag;
    tag.spec = spec;
    tag.decay = decay;
    tag.memory = BitVec(static_cast<std::size_t>(spec.total_bits()));
    tag.cells.reserve(static_cast<std::size_t>(spec.total_bits()));

    auto cell_eng = derive_stream(seed, 0);
    tag.rng_state = derive_stream(seed, 1);

    for (int i = 0; i < spec.total_bits(); ++i) {
        CellParams c;
        if (bernoulli(cell_eng, spec.noisy_fraction)) {
            c.one_prob = 0.5;
        } else if (spec.beta_bias_alpha > 0.0) {
            c.one_prob = detail::sample_beta_symmetric(cell_eng, spec.beta_bias_alpha);
        } else {
            c.one_prob = bernoulli(cell_eng, 0.5) ? 1.0 : 0.0;
        }
        c.decay_time = detail::sample_decay_time(cell_eng, decay.midpoint_s, decay.slope_s);
        tag.cells.push_back(c);
    }
    return tag;
}

/// Supply power at `at_time_s`. Cells whose stored value outlived the
/// unpowered gap keep it; the rest (and every cell on the first-ever
/// power-up) sample fresh from their power-up distribution.
inline void power_on(TagState& tag, double at_time_s) {
    if (at_time_s < tag.clock_s) throw ClockError("power_on: time moving backwards");
    if (tag.powered) throw PowerStateError("power_on: tag is already powered");

    const double elapsed =
        (at_time_s - tag.last_power_off_s) * temp_factor(tag.decay, tag.spec.temperature_c);

    for (std::size_t i = 0; i < tag.cells.size(); ++i) {
        if (!tag.ever_powered || elapsed > tag.cells[i].decay_time) {
            tag.memory.set(i, bernoulli(tag.rng_state, tag.cells[i].one_prob));
        }
    }
    tag.powered = true;
    tag.ever_powered = true;
    tag.clock_s = at_time_s;
}

/// Remove power at `at_time_s`. Memory is frozen as stored; whether it
/// survives is resolved lazily by the next power_on.
inline void power_off(TagState& tag, double at_time_s) {
    if (at_time_s < tag.clock_s) throw ClockError("power_off: time moving backwards");
    if (!tag.powered) throw PowerStateError("power_off: tag is not powered");
    tag.powered = false;
    tag.last_power_off_s = at_time_s;
    tag.clock_s = at_time_s;
}

inline BitVec read_bits(const TagState& tag, std::size_t offset_bits, std::size_t len_bits) {
    if (!tag.powered) throw PowerStateError("read_bits: tag is not powered");
    if (offset_bits + len_bits > tag.memory.size())
        throw BoundsError("read_bits: range out of bounds");
    return tag.memory.slice(offset_bits, len_bits);
}

inline void write_bits(TagState& tag, std::size_t offset_bits, const BitVec& bits) {
    if (!tag.powered) throw PowerStateError("write_bits: tag is not powered");
    if (offset_bits + bits.size() > tag.memory.size())
        throw BoundsError("write_bits: range out of bounds");
    tag.memory.overwrite(offset_bits, bits);
}

}  // namespace ramrng
