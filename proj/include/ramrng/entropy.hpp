#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ramrng/bits.hpp"
#include "ramrng/errors.hpp"
#include "ramrng/extractor.hpp"
#include "ramrng/random.hpp"
#include "ramrng/sram_model.hpp"

namespace ramrng {

/// Empirical per-bit `1` frequencies over repeated cold boots.
struct BiasProfile {
    std::vector<double> per_bit_one_freq;
    long trials = 0;
};

/// One line of the feasibility table: how many harvests (and how much
/// cooldown waiting) a protocol's entropy demand costs on a given tag.
struct BudgetRow {
    long long free_bytes = 0;
    long long capacity_bits = 0;
    long long protocol_bits = 0;
    long long harvests = 0;
    double cooldown_s = 0.0;
    double wait_s_between = 0.0;  // (harvests - 1) waits
    double wait_s_per = 0.0;      // one wait per harvest
};

namespace detail {
inline constexpr std::uint64_t kBiasTrialStream = 0xB1A5000000000000ULL;
}

/// Repeated independent first power-ups of the cells described by `cells`.
/// Trial t draws from its own derived substream, so results do not depend
/// on evaluation order across trials.
inline BiasProfile estimate_biases(const std::vector<CellParams>& cells, std::uint64_t seed,
                                   long trials) {
    if (trials < 1) throw ConstraintError("estimate_biases: trials must be >= 1");
    if (cells.empty()) throw ConstraintError("estimate_biases: no cells");
    std::vector<long> ones(cells.size(), 0);
    for (long t = 0; t < trials; ++t) {
        auto eng = derive_stream(seed, detail::kBiasTrialStream + static_cast<std::uint64_t>(t));
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (bernoulli(eng, cells[i].one_prob)) ++ones[i];
    }
    BiasProfile prof;
    prof.trials = trials;
    prof.per_bit_one_freq.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        prof.per_bit_one_freq[i] = static_cast<double>(ones[i]) / static_cast<double>(trials);
    return prof;
}

/// Recreates the tag from (spec, decay, seed) and measures it.
inline BiasProfile estimate_biases(const TagSpec& spec, const DecayParams& decay,
                                   std::uint64_t seed, long trials) {
    const TagState tag = create_tag(spec, decay, seed);
    return estimate_biases(tag.cells, seed, trials);
}

/// Mean over bits of -log2(max(p, 1-p)). Bits observed fully stable
/// (p in {0, 1}) contribute exactly 0.
inline double min_entropy_density(const BiasProfile& profile) {
    if (profile.per_bit_one_freq.empty()) throw ConstraintError("min_entropy_density: empty profile");
    double sum = 0.0;
    for (double p : profile.per_bit_one_freq) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConstraintError("min_entropy_density: frequency outside [0, 1]");
        if (p == 0.0 || p == 1.0) continue;
        sum += -std::log2(p > 0.5 ? p : 1.0 - p);
    }
    return sum / static_cast<double>(profile.per_bit_one_freq.size());
}

struct MonobitResult {
    double statistic = 0.0;  // z = |ones - n/2| / (sqrt(n)/2)
    double p_value = 1.0;
    bool pass = false;
};

/// Frequency (monobit) test: two-sided normal test on the ones count.
inline MonobitResult monobit_test(const BitVec& bits, double alpha) {
    if (bits.size() < 100) throw InsufficientInputError("monobit_test: need at least 100 bits");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConstraintError("monobit_test: alpha must be in (0, 1)");
    const double n = static_cast<double>(bits.size());
    const double ones = static_cast<double>(bits.count_ones());
    MonobitResult res;
    res.statistic = std::fabs(ones - n / 2.0) / (std::sqrt(n) / 2.0);
    res.p_value = std::erfc(res.statistic / std::sqrt(2.0));
    res.pass = res.p_value >= alpha;
    return res;
}

/// Lag-1 Pearson correlation, computed circularly (last bit pairs with the
/// first) so that exactly balanced periodic patterns come out exact.
inline double serial_correlation(const BitVec& bits) {
    const std::size_t n = bits.size();
    if (n < 100) throw InsufficientInputError("serial_correlation: need at least 100 bits");
    const double mean = static_cast<double>(bits.count_ones()) / static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = static_cast<double>(bits.get(i)) - mean;
        const double xj = static_cast<double>(bits.get((i + 1) % n)) - mean;
        num += xi * xj;
        den += xi * xi;
    }
    if (den == 0.0) throw ConstraintError("serial_correlation: zero variance");
    return num / den;
}

/// Budget line for a known per-harvest capacity.
inline BudgetRow budget_with_capacity(long long free_bytes, long long capacity_bits,
                                      long long protocol_bits, double cooldown_s) {
    if (protocol_bits <= 0) throw ConstraintError("budget: protocol_bits must be positive");
    if (!(cooldown_s > 0.0)) throw ConstraintError("budget: cooldown_s must be positive");
    if (capacity_bits <= 0) throw InfeasibleError("budget: per-harvest capacity is zero");
    BudgetRow row;
    row.free_bytes = free_bytes;
    row.capacity_bits = capacity_bits;
    row.protocol_bits = protocol_bits;
    row.harvests = (protocol_bits + capacity_bits - 1) / capacity_bits;
    row.cooldown_s = cooldown_s;
    row.wait_s_between = static_cast<double>(row.harvests - 1) * cooldown_s;
    row.wait_s_per = static_cast<double>(row.harvests) * cooldown_s;
    return row;
}

/// Budget line from a memory size and an entropy density.
inline BudgetRow budget(long long free_bytes, double density, long long protocol_bits,
                        double cooldown_s) {
    if (free_bytes <= 0) throw ConstraintError("budget: free_bytes must be positive");
    if (!(density > 0.0)) throw ConstraintError("budget: density must be positive");
    return budget_with_capacity(free_bytes, entropy_capacity(free_bytes, density), protocol_bits,
                                cooldown_s);
}

}  // namespace ramrng
