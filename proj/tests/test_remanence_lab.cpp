#include <algorithm>
#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "ramrng/remanence_lab.hpp"

using namespace ramrng;

namespace {

std::vector<DecaySample> synthetic(double a, double t0, double s) {
    std::vector<DecaySample> out;
    for (double t = 0.0; t <= 60.0; t += 5.0)
        out.push_back({0, t, a / (1.0 + std::exp(-(t - t0) / s))});
    return out;
}

}  // namespace

TEST_CASE("zero gap reads back exactly what was written") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 4);
    const auto samples = run_decay_experiment(tag, {0.0}, 99);
    REQUIRE(samples.size() == 1);
    REQUIRE(samples[0].hamming == 0.0);
    REQUIRE(samples[0].interval_s == 0.0);
}

TEST_CASE("short gaps decay almost nothing, long gaps halve the memory") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 4);
    const auto samples = run_decay_experiment(tag, {15.0, 60.0}, 99);
    REQUIRE(samples[0].hamming <= 0.01);
    REQUIRE(samples[1].hamming >= 0.47);
    REQUIRE(samples[1].hamming <= 0.53);
}

TEST_CASE("experiment validates its interval list") {
    TagState tag = create_tag(TagSpec{}, DecayParams{}, 4);
    REQUIRE_THROWS_AS(run_decay_experiment(tag, {5.0, 1.0}, 3), ConstraintError);
    REQUIRE_THROWS_AS(run_decay_experiment(tag, {-1.0, 5.0}, 3), ConstraintError);
}

TEST_CASE("experiment is deterministic in tag seed and pattern seed") {
    const std::vector<double> intervals{0.0, 10.0, 25.0, 40.0};
    TagState a = create_tag(TagSpec{}, DecayParams{}, 12);
    TagState b = create_tag(TagSpec{}, DecayParams{}, 12);
    const auto ra = run_decay_experiment(a, intervals, 7);
    const auto rb = run_decay_experiment(b, intervals, 7);
    for (std::size_t i = 0; i < intervals.size(); ++i)
        REQUIRE(ra[i].hamming == rb[i].hamming);

    TagState c = create_tag(TagSpec{}, DecayParams{}, 12);
    const auto rc = run_decay_experiment(c, intervals, 8);  // fresh patterns
    bool any_differs = false;
    for (std::size_t i = 1; i < intervals.size(); ++i)
        any_differs = any_differs || rc[i].hamming != ra[i].hamming;
    REQUIRE(any_differs);
}

TEST_CASE("mean decay grows with the gap on a well-separated grid") {
    const std::vector<double> intervals{0.0, 18.0, 21.0, 24.0, 27.0, 60.0};
    std::vector<double> mean(intervals.size(), 0.0);
    const int tags = 20;
    for (int i = 0; i < tags; ++i) {
        TagState tag = population_tag(TagSpec{}, DecayParams{}, 2025, i);
        const auto samples = run_decay_experiment(tag, intervals, 1000 + i, i);
        for (std::size_t k = 0; k < intervals.size(); ++k) mean[k] += samples[k].hamming;
    }
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] /= tags;
    REQUIRE(std::is_sorted(mean.begin(), mean.end()));
    REQUIRE(mean.front() == 0.0);
    REQUIRE(mean.back() > 0.47);
}

TEST_CASE("noiseless logistic samples are recovered to machine precision") {
    const auto fit = fit_logistic(synthetic(0.5, 20.0, 1.25));
    REQUIRE(fit.amplitude == Catch::Approx(0.5).margin(1e-3));
    REQUIRE(fit.midpoint_s == Catch::Approx(20.0).margin(1e-3));
    REQUIRE(fit.slope_s == Catch::Approx(1.25).margin(1e-3));
    REQUIRE(fit.rss <= 1e-10);
}

TEST_CASE("fit recovers other corner parameters") {
    for (const auto& [a, t0, s] : {std::tuple{1.0, 30.0, 4.0}, std::tuple{0.25, 10.0, 0.8},
                                   std::tuple{0.5, 40.0, 2.5}}) {
        const auto fit = fit_logistic(synthetic(a, t0, s));
        REQUIRE(fit.amplitude == Catch::Approx(a).margin(1e-3));
        REQUIRE(fit.midpoint_s == Catch::Approx(t0).margin(1e-3));
        REQUIRE(fit.slope_s == Catch::Approx(s).margin(1e-3));
        REQUIRE(fit.rss <= 1e-10);
    }
}

TEST_CASE("degenerate inputs cannot be fitted") {
    std::vector<DecaySample> flat;
    for (double t = 0.0; t <= 30.0; t += 5.0) flat.push_back({0, t, 0.25});
    REQUIRE_THROWS_AS(fit_logistic(flat), FitError);

    std::vector<DecaySample> few = {{0, 0.0, 0.0}, {0, 10.0, 0.2}, {0, 20.0, 0.5}};
    REQUIRE_THROWS_AS(fit_logistic(few), FitError);
}

TEST_CASE("fit quality does not depend on sample order") {
    auto samples = synthetic(0.5, 22.0, 1.5);
    const auto fit1 = fit_logistic(samples);
    std::shuffle(samples.begin(), samples.end(), std::mt19937(3));
    const auto fit2 = fit_logistic(samples);
    REQUIRE(std::fabs(fit1.rss - fit2.rss) < 1e-9);
    REQUIRE(fit1.midpoint_s == Catch::Approx(fit2.midpoint_s).margin(1e-6));
}

TEST_CASE("fitted midpoints track the planted per-tag midpoint") {
    std::vector<double> intervals;
    for (double t = 0.0; t <= 60.0; t += 5.0) intervals.push_back(t);
    for (int i = 0; i < 10; ++i) {
        const DecayParams planted = population_decay(DecayParams{}, 404, i);
        TagState tag = create_tag(TagSpec{}, planted, 900 + i);
        const auto samples = run_decay_experiment(tag, intervals, 40 + i, i);
        const auto fit = fit_logistic(samples);
        REQUIRE(fit.midpoint_s == Catch::Approx(planted.midpoint_s).margin(1.0));
    }
}

TEST_CASE("full decay time closed form") {
    const LogisticFit fit{0.5, 20.0, 1.25, 0.0};
    REQUIRE(full_decay_time(fit, 0.5) == Catch::Approx(20.0).margin(1e-12));
    REQUIRE(full_decay_time(fit, 0.96) == Catch::Approx(20.0 + 1.25 * std::log(24.0)).margin(1e-12));
    REQUIRE(full_decay_time(fit, 0.96) == Catch::Approx(23.97).margin(0.01));
    REQUIRE_THROWS_AS(full_decay_time(fit, 0.0), ConstraintError);
    REQUIRE_THROWS_AS(full_decay_time(fit, 1.0), ConstraintError);

    // strictly increasing in the threshold
    REQUIRE(full_decay_time(fit, 0.97) > full_decay_time(fit, 0.96));
    // increasing in the slope for thresholds past the midpoint
    const LogisticFit steeper{0.5, 20.0, 2.0, 0.0};
    REQUIRE(full_decay_time(steeper, 0.96) > full_decay_time(fit, 0.96));
}

TEST_CASE("sample and fit CSV rendering") {
    const std::vector<DecaySample> samples = {{0, 0.0, 0.0}, {0, 5.0, 0.125}};
    REQUIRE(samples_to_csv(samples) ==
            "tag_id,interval_s,hamming_fraction\n"
            "0,0.000000,0.000000\n"
            "0,5.000000,0.125000\n");

    const std::vector<std::pair<int, LogisticFit>> fits = {{2, LogisticFit{0.5, 23.5, 1.25, 0.0}}};
    REQUIRE(fits_to_csv(fits) ==
            "tag_id,amplitude,midpoint_s,slope_s,rss\n"
            "2,0.500000,23.500000,1.250000,0.000000\n");
}
