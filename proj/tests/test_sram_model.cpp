#include <catch2/catch_amalgamated.hpp>

#include "ramrng/random.hpp"
#include "ramrng/sram_model.hpp"

using namespace ramrng;

namespace {

BitVec boot_pattern(std::uint64_t seed, std::size_t n) {
    auto eng = derive_stream(seed, 77);
    return random_bits(eng, n);
}

}  // namespace

TEST_CASE("spec validation rejects broken geometry and rates") {
    TagSpec s;
    REQUIRE_NOTHROW(validate(s));

    s.total_bytes = 0;
    REQUIRE_THROWS_AS(validate(s), ConstraintError);
    s = TagSpec{};
    s.reserved_bytes = 511;
    s.excluded_bytes = 2;
    REQUIRE_THROWS_AS(validate(s), ConstraintError);
    s = TagSpec{};
    s.noisy_fraction = 1.2;
    REQUIRE_THROWS_AS(validate(s), ConstraintError);
    s = TagSpec{};
    s.beta_bias_alpha = -1.0;
    REQUIRE_THROWS_AS(validate(s), ConstraintError);

    DecayParams d;
    REQUIRE_NOTHROW(validate(d));
    d.midpoint_s = 0.0;
    REQUIRE_THROWS_AS(validate(d), ConstraintError);
    d = DecayParams{};
    d.slope_s = -1.0;
    REQUIRE_THROWS_AS(validate(d), ConstraintError);
    d = DecayParams{};
    d.temp_doubling_c = 0.0;
    REQUIRE_THROWS_AS(validate(d), ConstraintError);
    d = DecayParams{};
    d.midpoint_jitter_s = d.midpoint_s;  // would allow a non-positive midpoint
    REQUIRE_THROWS_AS(validate(d), ConstraintError);
}

TEST_CASE("temperature factor doubles per step above reference") {
    const DecayParams d;
    REQUIRE(temp_factor(d, d.temp_ref_c) == 1.0);
    REQUIRE(temp_factor(d, d.temp_ref_c + 10.0) == 2.0);
    REQUIRE(temp_factor(d, d.temp_ref_c - 10.0) == 0.5);
    REQUIRE(temp_factor(d, d.temp_ref_c + 20.0) == 4.0);
}

TEST_CASE("decay cdf hits one half at the midpoint and grows with time") {
    const DecayParams d;
    REQUIRE(decay_cdf(d, d.midpoint_s, d.temp_ref_c) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(decay_cdf(d, 0.0, d.temp_ref_c) < 1e-6);
    REQUIRE(decay_cdf(d, 1000.0, d.temp_ref_c) > 1.0 - 1e-9);
    // doubling the rate halves the time to the midpoint
    REQUIRE(decay_cdf(d, d.midpoint_s / 2.0, d.temp_ref_c + d.temp_doubling_c) ==
            Catch::Approx(0.5).margin(1e-12));
    double prev = -1.0;
    for (double t : {0.0, 10.0, 20.0, 23.5, 30.0, 60.0}) {
        const double c = decay_cdf(d, t, d.temp_ref_c);
        REQUIRE(c > prev);
        prev = c;
    }
    REQUIRE_THROWS_AS(decay_cdf(d, -0.5, d.temp_ref_c), BoundsError);
}

TEST_CASE("create_tag is deterministic in the seed") {
    const TagSpec spec;
    const DecayParams decay;
    TagState a = create_tag(spec, decay, 42);
    TagState b = create_tag(spec, decay, 42);
    REQUIRE(a.cells.size() == 4096);
    REQUIRE_FALSE(a.powered);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        REQUIRE(a.cells[i].one_prob == b.cells[i].one_prob);
        REQUIRE(a.cells[i].decay_time == b.cells[i].decay_time);
    }
    power_on(a, 0.0);
    power_on(b, 0.0);
    REQUIRE(a.memory == b.memory);

    TagState c = create_tag(spec, decay, 43);
    power_on(c, 0.0);
    REQUIRE(a.memory != c.memory);
}

TEST_CASE("cell population matches the configured mix") {
    const TagState tag = create_tag(TagSpec{}, DecayParams{}, 42);
    long noisy = 0, stable_ones = 0, stable = 0;
    for (const CellParams& c : tag.cells) {
        if (c.one_prob == 0.5) {
            ++noisy;
        } else {
            ++stable;
            REQUIRE((c.one_prob == 0.0 || c.one_prob == 1.0));
            if (c.one_prob == 1.0) ++stable_ones;
        }
        REQUIRE(c.decay_time > 0.0);
    }
    // 4096 cells at 10.3% noisy: 422 expected, 4-sigma band
    REQUIRE(noisy >= 344);
    REQUIRE(noisy <= 500);
    // stable cells split evenly between 0 and 1
    const double stable_one_frac = static_cast<double>(stable_ones) / static_cast<double>(stable);
    REQUIRE(stable_one_frac > 0.46);
    REQUIRE(stable_one_frac < 0.54);
}

TEST_CASE("graded bias mode draws stable cells from the open interval") {
    TagSpec spec;
    spec.beta_bias_alpha = 0.2;
    const TagState tag = create_tag(spec, DecayParams{}, 7);
    long extreme = 0;
    for (const CellParams& c : tag.cells) {
        REQUIRE(c.one_prob >= 0.0);
        REQUIRE(c.one_prob <= 1.0);
        if (c.one_prob == 0.0 || c.one_prob == 1.0) ++extreme;
    }
    // Beta(0.2, 0.2) concentrates near the edges but almost never exactly on them
    REQUIRE(extreme < 100);
}

TEST_CASE("first power-up samples every cell") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 42);
    REQUIRE(tag.memory.count_ones() == 0);  // unpowered, nothing sampled yet
    power_on(tag, 500.0);                   // long-idle first boot still samples
    const std::size_t ones = tag.memory.count_ones();
    REQUIRE(ones > 1800);
    REQUIRE(ones < 2300);
}

TEST_CASE("power state and clock guards") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 1);
    REQUIRE_THROWS_AS(power_off(tag, 0.0), PowerStateError);
    REQUIRE_THROWS_AS(read_bits(tag, 0, 8), PowerStateError);
    REQUIRE_THROWS_AS(write_bits(tag, 0, BitVec(8)), PowerStateError);

    power_on(tag, 10.0);
    REQUIRE_THROWS_AS(power_on(tag, 11.0), PowerStateError);
    REQUIRE_THROWS_AS(power_off(tag, 9.0), ClockError);
    power_off(tag, 12.0);
    REQUIRE_THROWS_AS(power_on(tag, 11.0), ClockError);

    power_on(tag, 12.0);  // equal timestamps are fine
    REQUIRE_THROWS_AS(read_bits(tag, 4090 * 8, 64), BoundsError);
    REQUIRE_THROWS_AS(write_bits(tag, 4095 * 8, BitVec(16)), BoundsError);
}

TEST_CASE("short power gaps preserve memory exactly") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 42);
    power_on(tag, 0.0);
    const BitVec pattern = boot_pattern(5, 4096);
    write_bits(tag, 0, pattern);

    power_off(tag, 100.0);
    power_on(tag, 100.0);  // zero gap: identity, always
    REQUIRE(read_bits(tag, 0, 4096) == pattern);

    power_off(tag, 200.0);
    power_on(tag, 205.0);  // 5 s: below every plausible cell decay time
    REQUIRE(read_bits(tag, 0, 4096) == pattern);
}

TEST_CASE("long power gaps re-randomize everything") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 42);
    power_on(tag, 0.0);
    const BitVec pattern = boot_pattern(6, 4096);
    write_bits(tag, 0, pattern);
    power_off(tag, 1.0);
    power_on(tag, 1.0e6);
    const double h = hamming_fraction(read_bits(tag, 0, 4096), pattern);
    REQUIRE(h > 0.47);
    REQUIRE(h < 0.53);
}

TEST_CASE("heat accelerates decay") {
    TagSpec hot_spec;
    hot_spec.temperature_c = 30.0;  // one doubling above reference

    TagState cold = create_tag(TagSpec{}, DecayParams{}, 42);
    TagState hot = create_tag(hot_spec, DecayParams{}, 42);
    const BitVec pattern = boot_pattern(7, 4096);
    for (TagState* tag : {&cold, &hot}) {
        power_on(*tag, 0.0);
        write_bits(*tag, 0, pattern);
        power_off(*tag, 1.0);
        power_on(*tag, 16.0);  // 15 s unpowered
    }
    const double h_cold = hamming_fraction(read_bits(cold, 0, 4096), pattern);
    const double h_hot = hamming_fraction(read_bits(hot, 0, 4096), pattern);
    REQUIRE(h_cold < 0.01);  // 15 s effective: almost nothing decays
    REQUIRE(h_hot > 0.40);   // 30 s effective: most of the curve is gone
}

TEST_CASE("per-tag decay midpoints spread around the base") {
    const DecayParams base;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 50; ++i) {
        const DecayParams d = population_decay(base, 123, i);
        REQUIRE(d.midpoint_s >= base.midpoint_s - base.midpoint_jitter_s);
        REQUIRE(d.midpoint_s <= base.midpoint_s + base.midpoint_jitter_s);
        lo = std::min(lo, d.midpoint_s);
        hi = std::max(hi, d.midpoint_s);
        // same (seed, index) always lands on the same midpoint
        REQUIRE(population_decay(base, 123, i).midpoint_s == d.midpoint_s);
    }
    REQUIRE(hi - lo > base.midpoint_jitter_s);  // the population actually spreads
}
