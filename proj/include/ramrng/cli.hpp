#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ramrng/entropy.hpp"
#include "ramrng/errors.hpp"
#include "ramrng/extractor.hpp"
#include "ramrng/protocol.hpp"
#include "ramrng/random.hpp"
#include "ramrng/remanence_lab.hpp"
#include "ramrng/sram_model.hpp"

namespace ramrng {

struct RunConfig {
    std::uint64_t seed = 1;
    TagSpec tag;
    DecayParams decay;
    PhConfig ph;
    std::string output_path;  // empty: standard output
};

namespace detail {

inline void require_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) { known = true; break; }
        if (!known) throw UsageError(std::string("config: unknown key '") + key + "' in " + where);
    }
}

}  // namespace detail

/// Overlays a parsed config document onto `cfg`. Unknown keys are errors.
inline void apply_config(RunConfig& cfg, const nlohmann::json& j) {
    try {
        detail::require_keys(j, {"seed", "tag", "decay", "ph", "output_path"}, "top level");
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
        if (j.contains("tag")) {
            const auto& t = j.at("tag");
            detail::require_keys(t,
                                 {"total_bytes", "reserved_bytes", "excluded_bytes",
                                  "noisy_fraction", "temperature_c", "beta_bias_alpha"},
                                 "tag");
            if (t.contains("total_bytes")) cfg.tag.total_bytes = t.at("total_bytes").get<int>();
            if (t.contains("reserved_bytes"))
                cfg.tag.reserved_bytes = t.at("reserved_bytes").get<int>();
            if (t.contains("excluded_bytes"))
                cfg.tag.excluded_bytes = t.at("excluded_bytes").get<int>();
            if (t.contains("noisy_fraction"))
                cfg.tag.noisy_fraction = t.at("noisy_fraction").get<double>();
            if (t.contains("temperature_c"))
                cfg.tag.temperature_c = t.at("temperature_c").get<double>();
            if (t.contains("beta_bias_alpha"))
                cfg.tag.beta_bias_alpha = t.at("beta_bias_alpha").get<double>();
        }
        if (j.contains("decay")) {
            const auto& d = j.at("decay");
            detail::require_keys(
                d, {"midpoint_s", "slope_s", "temp_ref_c", "temp_doubling_c", "midpoint_jitter_s"},
                "decay");
            if (d.contains("midpoint_s")) cfg.decay.midpoint_s = d.at("midpoint_s").get<double>();
            if (d.contains("slope_s")) cfg.decay.slope_s = d.at("slope_s").get<double>();
            if (d.contains("temp_ref_c")) cfg.decay.temp_ref_c = d.at("temp_ref_c").get<double>();
            if (d.contains("temp_doubling_c"))
                cfg.decay.temp_doubling_c = d.at("temp_doubling_c").get<double>();
            if (d.contains("midpoint_jitter_s"))
                cfg.decay.midpoint_jitter_s = d.at("midpoint_jitter_s").get<double>();
        }
        if (j.contains("ph")) {
            const auto& p = j.at("ph");
            detail::require_keys(p, {"word_bits"}, "ph");
            if (p.contains("word_bits")) cfg.ph.word_bits = p.at("word_bits").get<unsigned>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    validate(cfg.tag);
    validate(cfg.decay);
    validate(cfg.ph);
}

inline RunConfig load_run_config(const std::string& config_path) {
    RunConfig cfg;
    if (config_path.empty()) return cfg;
    std::ifstream in(config_path);
    if (!in) throw UsageError("config: cannot open '" + config_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config: parse error in '" + config_path + "': " + e.what());
    }
    apply_config(cfg, j);
    return cfg;
}

/// Expands "start:step:end" into a sorted interval list. A spec with
/// start == end denotes the single interval {start}.
inline std::vector<double> parse_interval_spec(const std::string& spec) {
    double start = 0.0, step = 0.0, end = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> start >> c1 >> step >> c2 >> end) || c1 != ':' || c2 != ':' ||
        !is.eof())
        throw UsageError("intervals: expected start:step:end, got '" + spec + "'");
    if (start < 0.0) throw UsageError("intervals: start must be non-negative");
    if (end < start) throw UsageError("intervals: end must be >= start");
    if (start == end) return {start};
    if (step <= 0.0) throw UsageError("intervals: step must be positive");
    std::vector<double> out;
    for (double t = start; t <= end + 1e-9; t += step) out.push_back(t);
    return out;
}

/// Atomically writes `content` to `path` (write to a temp file, then
/// rename), so a failed run never leaves a partial file behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw UsageError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw UsageError("cannot rename output into place: " + ec.message());
    }
}

namespace detail {

inline std::string normalized(std::string name) {
    for (char& c : name)
        if (c == '-') c = '_';
    return name;
}

inline std::string canonical_protocol(const std::string& name) {
    const std::string n = normalized(name);
    if (n == "hb_plus") return "hb_plus_parallel";
    return n;
}

inline std::uint64_t pattern_seed_for(std::uint64_t seed, int tag_index) {
    return splitmix64(seed ^ splitmix64(0x7061740000000000ULL + static_cast<std::uint64_t>(tag_index)));
}

}  // namespace detail

/// Decay experiment over a tag population; per-tag sample rows, population
/// averages (when more than one interval), and per-tag logistic fits (when
/// there are enough samples to fit).
inline std::string run_decay(const RunConfig& cfg, int tags, const std::string& intervals_spec) {
    if (tags < 1) throw UsageError("decay: tags must be >= 1");
    const std::vector<double> intervals = parse_interval_spec(intervals_spec);

    std::vector<std::vector<DecaySample>> per_tag;
    per_tag.reserve(static_cast<std::size_t>(tags));
    for (int i = 0; i < tags; ++i) {
        TagState tag = population_tag(cfg.tag, cfg.decay, cfg.seed, i);
        per_tag.push_back(
            run_decay_experiment(tag, intervals, detail::pattern_seed_for(cfg.seed, i), i));
    }

    std::ostringstream os;
    os << "tag_id,interval_s,hamming_fraction\n";
    os << std::fixed << std::setprecision(6);
    for (const auto& samples : per_tag)
        for (const DecaySample& p : samples)
            os << p.tag_id << ',' << p.interval_s << ',' << p.hamming << '\n';

    if (intervals.size() >= 2) {
        for (std::size_t k = 0; k < intervals.size(); ++k) {
            double acc = 0.0;
            for (const auto& samples : per_tag) acc += samples[k].hamming;
            os << "avg," << intervals[k] << ',' << acc / static_cast<double>(tags) << '\n';
        }
    }

    if (intervals.size() >= 4) {
        std::vector<std::pair<int, LogisticFit>> fits;
        for (int i = 0; i < tags; ++i) {
            try {
                fits.emplace_back(i, fit_logistic(per_tag[static_cast<std::size_t>(i)]));
            } catch (const FitError&) {
                // degenerate tag data: no fit row
            }
        }
        if (!fits.empty()) os << fits_to_csv(fits);
    }
    return os.str();
}

/// Resolves a tag generation name to its memory geometry.
inline TagSpec generation_spec(const RunConfig& cfg, const std::string& generation) {
    TagSpec spec = cfg.tag;
    const std::string g = detail::normalized(generation);
    if (g == "wisp41") {
        spec.total_bytes = 512;
        spec.reserved_bytes = 136;
    } else if (g == "wisp2x") {
        spec.total_bytes = 256;
        spec.reserved_bytes = 112;
    } else if (g != "custom") {
        throw UsageError("budget: unknown generation '" + generation + "'");
    }
    validate(spec);
    return spec;
}

/// Feasibility table: one row per supply model, both wait conventions as
/// columns.
inline std::string run_budget(const RunConfig& cfg, const std::string& protocol,
                              const std::string& generation) {
    const std::string proto = detail::canonical_protocol(protocol);
    const long long protocol_bits = consumption_profile(proto);
    const TagSpec spec = generation_spec(cfg, generation);
    const long long free_b = spec.free_bytes();

    validate(cfg.ph);
    const long long bits_per_chunk = cfg.ph.input_bits_per_hash();
    const long long yield_bits = (free_b * 8 / bits_per_chunk) * cfg.ph.output_bits();

    const BudgetRow by_capacity =
        budget(free_b, spec.noisy_fraction, protocol_bits, kDefaultCooldownS);
    const BudgetRow by_yield =
        budget_with_capacity(free_b, yield_bits, protocol_bits, kDefaultCooldownS);

    std::ostringstream os;
    os << "generation,free_bytes,capacity_bits,protocol,protocol_bits,harvests,"
          "wait_between_s,wait_per_s,supply_model\n";
    const auto emit = [&](const BudgetRow& row, SupplyModel model) {
        os << detail::normalized(generation) << ',' << row.free_bytes << ',' << row.capacity_bits
           << ',' << proto << ',' << row.protocol_bits << ',' << row.harvests << ','
           << row.wait_s_between << ',' << row.wait_s_per << ',' << to_string(model) << '\n';
    };
    emit(by_capacity, SupplyModel::entropy_capacity);
    emit(by_yield, SupplyModel::extractor_yield);
    return os.str();
}

/// Repeated harvest cycles with a configurable off-interval between them;
/// one uppercase hex line per cycle. A zero off-interval keeps the memory
/// from re-randomizing, so every line repeats.
inline std::string run_harvest(const RunConfig& cfg, long cycles, double off_interval_s) {
    if (cycles < 1) throw UsageError("harvest: cycles must be >= 1");
    if (off_interval_s < 0.0) throw UsageError("harvest: off-interval must be non-negative");

    TagState tag = create_tag(cfg.tag, cfg.decay, cfg.seed);
    std::ostringstream os;
    double t = tag.clock_s;
    for (long c = 0; c < cycles; ++c) {
        power_on(tag, t);
        os << harvest(tag, cfg.ph).bits.to_hex() << '\n';
        power_off(tag, t);
        t += off_interval_s;
    }
    return os.str();
}

/// Runs the cooldown scheduler until the protocol's demand is covered, then
/// (for HB+) authenticates from the pooled bits.
inline std::string run_auth(const RunConfig& cfg, const std::string& protocol,
                            const std::string& supply_model, const std::string& convention) {
    const std::string proto = detail::canonical_protocol(protocol);
    const long long profile_bits = consumption_profile(proto);

    const std::string sm_name = detail::normalized(supply_model);
    SupplyModel sm;
    if (sm_name == "entropy_capacity")
        sm = SupplyModel::entropy_capacity;
    else if (sm_name == "extractor_yield")
        sm = SupplyModel::extractor_yield;
    else
        throw UsageError("auth: unknown supply model '" + supply_model + "'");

    const std::string wc_name = detail::normalized(convention);
    WaitConvention wc;
    if (wc_name == "between")
        wc = WaitConvention::between;
    else if (wc_name == "per")
        wc = WaitConvention::per;
    else
        throw UsageError("auth: unknown wait convention '" + convention + "'");

    TagState tag = create_tag(cfg.tag, cfg.decay, cfg.seed);
    EntropyPool pool;
    const ScheduleResult sched =
        scheduled_auth(tag, cfg.ph, profile_bits, kDefaultCooldownS, sm, wc, &pool);

    std::ostringstream os;
    os << sched.harvests << " harvests, " << sched.sim_wall_time_s << " s";
    if (proto == "hb_plus_parallel") {
        HbPlusParams params;
        const HbSecrets secrets = keygen(params, splitmix64(cfg.seed ^ 0x6B65790000000000ULL));
        const AuthResult res =
            authenticate(secrets, params, pool, splitmix64(cfg.seed ^ 0x6368616C00000000ULL),
                         splitmix64(cfg.seed ^ 0x6E6F697300000000ULL));
        os << ", " << (res.accepted ? "accepted" : "rejected") << ", " << res.entropy_consumed
           << " bits";
    } else {
        os << ", " << profile_bits << " bits";
    }
    os << '\n';
    return os.str();
}

}  // namespace ramrng
