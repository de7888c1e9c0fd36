#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ramrng/bits.hpp"
#include "ramrng/errors.hpp"
#include "ramrng/random.hpp"
#include "ramrng/sram_model.hpp"

namespace ramrng {

/// One write/power-gap/read-back measurement.
struct DecaySample {
    int tag_id = 0;
    double interval_s = 0.0;
    double hamming = 0.0;  // mismatch fraction over the scored bits
};

/// Logistic model hamming(t) = A / (1 + exp(-(t - t0)/s)).
struct LogisticFit {
    double amplitude = 0.0;
    double midpoint_s = 0.0;
    double slope_s = 0.0;
    double rss = 0.0;
};

/// Builds tag `tag_index` of a seeded population: per-tag decay midpoint
/// jitter plus an independent cell seed.
inline TagState population_tag(const TagSpec& spec, const DecayParams& base_decay,
                               std::uint64_t seed, int tag_index) {
    const DecayParams d = population_decay(base_decay, seed, tag_index);
    const std::uint64_t tag_seed =
        splitmix64(seed ^ splitmix64(0x7467000000000000ULL + static_cast<std::uint64_t>(tag_index)));
    return create_tag(spec, d, tag_seed);
}

/// For each off-interval: power up, fill all memory with a fresh seeded
/// pseudorandom pattern, cut power for the interval, power up again and
/// read back. The Hamming fraction is scored over every bit except the
/// leading excluded bytes (debugger-clobbered on the real hardware).
/// Each interval gets an independent pattern.
inline std::vector<DecaySample> run_decay_experiment(TagState& tag,
                                                     const std::vector<double>& intervals,
                                                     std::uint64_t pattern_seed, int tag_id = 0) {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i] < 0.0)
            throw ConstraintError("run_decay_experiment: intervals must be non-negative");
        if (i > 0 && intervals[i] < intervals[i - 1])
            throw ConstraintError("run_decay_experiment: intervals must be sorted ascending");
    }
    const std::size_t nbits = static_cast<std::size_t>(tag.spec.total_bits());
    const std::size_t skip = static_cast<std::size_t>(tag.spec.excluded_bytes) * 8;

    std::vector<DecaySample> out;
    out.reserve(intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (!tag.powered) power_on(tag, tag.clock_s);
        auto pattern_eng = derive_stream(pattern_seed, i);
        const BitVec pattern = random_bits(pattern_eng, nbits);
        write_bits(tag, 0, pattern);
        power_off(tag, tag.clock_s);
        power_on(tag, tag.clock_s + intervals[i]);
        const BitVec back = read_bits(tag, 0, nbits);
        const double h =
            hamming_fraction(pattern.slice(skip, nbits - skip), back.slice(skip, nbits - skip));
        out.push_back(DecaySample{tag_id, intervals[i], h});
    }
    return out;
}

namespace detail {

inline double logistic_sigma(double t, double t0, double s) {
    return 1.0 / (1.0 + std::exp(-(t - t0) / s));
}

inline double logistic_rss(const std::vector<DecaySample>& samples, double a, double t0, double s) {
    double rss = 0.0;
    for (const DecaySample& p : samples) {
        const double r = p.hamming - a * logistic_sigma(p.interval_s, t0, s);
        rss += r * r;
    }
    return rss;
}

/// Least-squares amplitude for fixed (t0, s), clamped to (0, 1].
inline double logistic_best_amplitude(const std::vector<DecaySample>& samples, double t0,
                                      double s) {
    double num = 0.0, den = 0.0;
    for (const DecaySample& p : samples) {
        const double sig = logistic_sigma(p.interval_s, t0, s);
        num += p.hamming * sig;
        den += sig * sig;
    }
    if (den <= 0.0) return 1.0;
    return std::clamp(num / den, 1e-9, 1.0);
}

/// Solves the 3x3 system M x = b by Gaussian elimination with partial
/// pivoting; returns false when M is numerically singular.
inline bool solve3(double m[3][3], double b[3], double x[3]) {
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(m[idx[r]][col]) > std::fabs(m[idx[piv]][col])) piv = r;
        std::swap(idx[col], idx[piv]);
        const double d = m[idx[col]][col];
        if (std::fabs(d) < 1e-300) return false;
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[idx[r]][col] / d;
            for (int c = col; c < 3; ++c) m[idx[r]][c] -= f * m[idx[col]][c];
            b[idx[r]] -= f * b[idx[col]];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double acc = b[idx[row]];
        for (int c = row + 1; c < 3; ++c) acc -= m[idx[row]][c] * x[c];
        x[row] = acc / m[idx[row]][row];
    }
    return true;
}

}  // namespace detail

/// Nonlinear least squares for the three logistic parameters: a coarse
/// (t0, s) grid with the closed-form amplitude, then Levenberg-Marquardt
/// with the analytic Jacobian. Deterministic for fixed inputs.
inline LogisticFit fit_logistic(const std::vector<DecaySample>& samples) {
    if (samples.size() < 4) throw FitError("fit_logistic: need at least 4 samples");
    bool varied = false;
    for (const DecaySample& p : samples)
        if (p.hamming != samples.front().hamming) { varied = true; break; }
    if (!varied) throw FitError("fit_logistic: degenerate samples (all hamming equal)");

    double tmax = 0.0;
    for (const DecaySample& p : samples) tmax = std::max(tmax, p.interval_s);
    tmax = std::max(tmax, 1.0);

    double best_a = 0.5, best_t0 = tmax / 2.0, best_s = tmax / 10.0;
    double best_rss = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 120; ++i) {
        const double t0 = tmax * static_cast<double>(i) / 120.0;
        for (int j = 0; j <= 90; ++j) {
            // s spans three decades below tmax, log-spaced
            const double s = tmax * std::pow(10.0, -3.0 * (1.0 - static_cast<double>(j) / 90.0));
            const double a = detail::logistic_best_amplitude(samples, t0, s);
            const double rss = detail::logistic_rss(samples, a, t0, s);
            if (rss < best_rss) {
                best_rss = rss;
                best_a = a;
                best_t0 = t0;
                best_s = s;
            }
        }
    }

    double a = best_a, t0 = best_t0, s = best_s, rss = best_rss;
    double lambda = 1e-3;
    for (int iter = 0; iter < 300; ++iter) {
        double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double jtr[3] = {0, 0, 0};
        for (const DecaySample& p : samples) {
            const double sig = detail::logistic_sigma(p.interval_s, t0, s);
            const double d = sig * (1.0 - sig);
            const double g[3] = {sig,                                      // d/dA
                                 -a * d / s,                               // d/dt0
                                 -a * d * (p.interval_s - t0) / (s * s)};  // d/ds
            const double r = p.hamming - a * sig;
            for (int u = 0; u < 3; ++u) {
                jtr[u] += g[u] * r;
                for (int v = 0; v < 3; ++v) jtj[u][v] += g[u] * g[v];
            }
        }
        double m[3][3];
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
                m[u][v] = jtj[u][v] + (u == v ? lambda * std::max(jtj[u][u], 1e-12) : 0.0);
        double b[3] = {jtr[0], jtr[1], jtr[2]};
        double step[3];
        if (!detail::solve3(m, b, step)) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }
        const double na = std::clamp(a + step[0], 1e-9, 1.0);
        const double nt0 = t0 + step[1];
        const double ns = std::max(s + step[2], 1e-9);
        const double nrss = detail::logistic_rss(samples, na, nt0, ns);
        if (nrss < rss) {
            const double improvement = rss - nrss;
            a = na;
            t0 = nt0;
            s = ns;
            rss = nrss;
            lambda = std::max(lambda / 3.0, 1e-12);
            if (improvement < 1e-18 && rss < 1e-14) break;
        } else {
            lambda *= 4.0;
            if (lambda > 1e12) break;
        }
    }
    return LogisticFit{a, t0, s, rss};
}

/// First time the fitted curve reaches `threshold_fraction` of its
/// asymptote: t0 + s * ln(th / (1 - th)).
inline double full_decay_time(const LogisticFit& fit, double threshold_fraction = 0.96) {
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw ConstraintError("full_decay_time: threshold must be in (0, 1)");
    return fit.midpoint_s + fit.slope_s * std::log(threshold_fraction / (1.0 - threshold_fraction));
}

inline std::string samples_to_csv(const std::vector<DecaySample>& samples) {
    std::ostringstream os;
    os << "tag_id,interval_s,hamming_fraction\n";
    os << std::fixed << std::setprecision(6);
    for (const DecaySample& p : samples)
        os << p.tag_id << ',' << p.interval_s << ',' << p.hamming << '\n';
    return os.str();
}

inline std::string fits_to_csv(const std::vector<std::pair<int, LogisticFit>>& fits) {
    std::ostringstream os;
    os << "tag_id,amplitude,midpoint_s,slope_s,rss\n";
    os << std::fixed << std::setprecision(6);
    for (const auto& [id, f] : fits)
        os << id << ',' << f.amplitude << ',' << f.midpoint_s << ',' << f.slope_s << ',' << f.rss
           << '\n';
    return os.str();
}

}  // namespace ramrng
