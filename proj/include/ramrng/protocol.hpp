#pragma once

#include <bit>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ramrng/bits.hpp"
#include "ramrng/errors.hpp"
#include "ramrng/extractor.hpp"
#include "ramrng/random.hpp"
#include "ramrng/sram_model.hpp"

namespace ramrng {

/// Unpowered interval needed before memory re-randomizes.
inline constexpr double kDefaultCooldownS = 30.0;

struct HbPlusParams {
    int secret_bits = 224;              // k
    int rounds = 80;                    // r
    double noise_rate = 0.25;           // eta
    double accept_fraction = 0.375;     // tau, defaults to (eta + 0.5)/2
};

inline void validate(const HbPlusParams& p) {
    if (p.secret_bits < 1 || p.rounds < 1)
        throw ConstraintError("HbPlusParams: secret_bits and rounds must be >= 1");
    if (!(p.noise_rate >= 0.0 && p.noise_rate < 0.5))
        throw ConstraintError("HbPlusParams: noise_rate must be in [0, 0.5)");
    if (!(p.accept_fraction > p.noise_rate && p.accept_fraction < 0.5))
        throw ConstraintError("HbPlusParams: accept_fraction must be in (noise_rate, 0.5)");
}

/// Rounds a session may fail and still be accepted: floor(tau * r).
inline int accept_threshold(const HbPlusParams& p) {
    return static_cast<int>(p.accept_fraction * p.rounds);
}

struct HbSecrets {
    BitVec x;
    BitVec y;
};

/// FIFO of harvested random bits with exact draw accounting.
class EntropyPool {
public:
    void deposit(const BitVec& bits) {
        buf_.append(bits);
        ++refills_;
    }

    BitVec draw(std::size_t n) {
        if (remaining() < n)
            throw InsufficientEntropyError("entropy pool underflow", n, remaining());
        BitVec out = buf_.slice(head_, n);
        head_ += n;
        drawn_ += static_cast<long long>(n);
        return out;
    }

    std::size_t remaining() const { return buf_.size() - head_; }
    long long drawn() const { return drawn_; }
    long long refills() const { return refills_; }
    long long deposited() const { return static_cast<long long>(buf_.size()); }

private:
    BitVec buf_;
    std::size_t head_ = 0;
    long long drawn_ = 0;
    long long refills_ = 0;
};

/// Inner product over GF(2).
inline int gf2_dot(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) throw ConstraintError("gf2_dot: length mismatch");
    int parity = 0;
    const auto& ab = a.bytes();
    const auto& bb = b.bytes();
    for (std::size_t i = 0; i < ab.size(); ++i)
        parity ^= std::popcount(static_cast<unsigned>(ab[i] & bb[i])) & 1;
    return parity;
}

struct RoundRecord {
    BitVec b;          // tag blinding vector
    BitVec a;          // reader challenge
    int z = 0;         // tag response
    int noise_bit = 0; // nu
};

inline HbSecrets keygen(const HbPlusParams& params, std::uint64_t seed) {
    validate(params);
    auto eng = derive_stream(seed, 0x4B45590000000000ULL);
    HbSecrets s;
    s.x = random_bits(eng, static_cast<std::size_t>(params.secret_bits));
    s.y = random_bits(eng, static_cast<std::size_t>(params.secret_bits));
    return s;
}

/// One HB+ round on the tag side: draws the k-bit blinding vector from the
/// pool, flips the response with probability eta from the dedicated noise
/// stream. Challenge bits are the reader's problem and are not charged here.
inline RoundRecord tag_round(const HbSecrets& secrets, const BitVec& a, EntropyPool& pool,
                             double eta, std::mt19937_64& noise_eng) {
    if (a.size() != secrets.x.size()) throw ConstraintError("tag_round: challenge length mismatch");
    RoundRecord rec;
    rec.a = a;
    rec.b = pool.draw(secrets.y.size());
    rec.noise_bit = bernoulli(noise_eng, eta) ? 1 : 0;
    rec.z = gf2_dot(rec.a, secrets.x) ^ gf2_dot(rec.b, secrets.y) ^ rec.noise_bit;
    return rec;
}

struct AuthResult {
    bool accepted = false;
    int mismatches = 0;
    long long entropy_consumed = 0;
    std::vector<RoundRecord> rounds;
};

/// Full r-round session: fresh uniform challenges, reader recomputes each
/// response noiselessly, accepts when mismatches stay at or below
/// floor(tau * r). Pool underflow aborts with the round index reached.
inline AuthResult authenticate(const HbSecrets& secrets, const HbPlusParams& params,
                               EntropyPool& pool, std::uint64_t challenge_seed,
                               std::uint64_t noise_seed) {
    validate(params);
    auto challenge_eng = derive_stream(challenge_seed, 0x4348414C00000000ULL);
    auto noise_eng = derive_stream(noise_seed, 0x4E4F495345000000ULL);
    const int threshold = accept_threshold(params);

    AuthResult res;
    res.rounds.reserve(static_cast<std::size_t>(params.rounds));
    for (int i = 0; i < params.rounds; ++i) {
        const BitVec a = random_bits(challenge_eng, static_cast<std::size_t>(params.secret_bits));
        RoundRecord rec;
        try {
            rec = tag_round(secrets, a, pool, params.noise_rate, noise_eng);
        } catch (const InsufficientEntropyError& e) {
            throw InsufficientEntropyError(e.what(), e.requested_bits, e.available_bits, i);
        }
        const int expected = gf2_dot(rec.a, secrets.x) ^ gf2_dot(rec.b, secrets.y);
        if (rec.z != expected) ++res.mismatches;
        res.entropy_consumed += params.secret_bits;
        res.rounds.push_back(std::move(rec));
    }
    res.accepted = res.mismatches <= threshold;
    return res;
}

/// Session against an adversary that answers every challenge with a coin
/// flip; each round mismatches with probability 1/2.
inline AuthResult authenticate_random_responder(const HbSecrets& secrets,
                                                const HbPlusParams& params, std::uint64_t seed) {
    validate(params);
    auto eng = derive_stream(seed, 0x6164760000000000ULL);
    const int threshold = accept_threshold(params);
    AuthResult res;
    for (int i = 0; i < params.rounds; ++i) {
        const BitVec a = random_bits(eng, static_cast<std::size_t>(params.secret_bits));
        const BitVec b = random_bits(eng, static_cast<std::size_t>(params.secret_bits));
        const int z_adv = bernoulli(eng, 0.5) ? 1 : 0;
        const int expected = gf2_dot(a, secrets.x) ^ gf2_dot(b, secrets.y);
        if (z_adv != expected) ++res.mismatches;
    }
    res.accepted = res.mismatches <= threshold;
    return res;
}

/// Entropy demand per session of the modeled protocols.
inline long long consumption_profile(std::string_view protocol_name) {
    if (protocol_name == "hb_plus_parallel") return 17920;
    if (protocol_name == "hb_sharp") return 512;
    throw UsageError("consumption_profile: unknown protocol '" + std::string(protocol_name) + "'");
}

/// Which per-harvest figure the scheduler credits.
enum class SupplyModel { entropy_capacity, extractor_yield };
/// Whether waiting happens between harvests (r - 1 waits) or once per
/// harvest (r waits).
enum class WaitConvention { between, per };

inline std::string to_string(SupplyModel m) {
    return m == SupplyModel::entropy_capacity ? "entropy_capacity" : "extractor_yield";
}

inline std::string to_string(WaitConvention c) {
    return c == WaitConvention::between ? "between" : "per";
}

struct PowerEvent {
    double at_s = 0.0;
    enum class Kind { power_on, harvest, power_off, wait } kind = Kind::power_on;
    long long bits = 0;  // credited bits for harvest events, else 0
};

struct ScheduleResult {
    long long harvests = 0;
    double sim_wall_time_s = 0.0;
    std::vector<PowerEvent> transcript;
};

/// Power-on / harvest / power-off / cooldown loop until the accumulated
/// credited bits cover `profile_bits`. When a pool is supplied, each
/// harvest also deposits its credited bits: literal extractor output under
/// extractor_yield, or the extractor output stretched to the capacity
/// figure by a seeded generator under entropy_capacity.
inline ScheduleResult scheduled_auth(TagState& tag, const PhConfig& cfg, long long profile_bits,
                                     double cooldown_s, SupplyModel supply_model,
                                     WaitConvention convention, EntropyPool* pool = nullptr) {
    if (profile_bits <= 0) throw ConstraintError("scheduled_auth: profile_bits must be positive");
    if (!(cooldown_s > 0.0)) throw ConstraintError("scheduled_auth: cooldown_s must be positive");

    ScheduleResult res;
    long long accumulated = 0;
    double t = tag.clock_s;
    while (accumulated < profile_bits) {
        power_on(tag, t);
        res.transcript.push_back({t, PowerEvent::Kind::power_on, 0});
        const HarvestReport rep = harvest(tag, cfg);
        const long long credit = supply_model == SupplyModel::entropy_capacity
                                     ? rep.entropy_capacity_bits
                                     : rep.extractor_yield_bits;
        if (credit <= 0) throw InfeasibleError("scheduled_auth: harvest supplies zero bits");
        if (pool != nullptr) {
            if (supply_model == SupplyModel::extractor_yield)
                pool->deposit(rep.bits);
            else
                pool->deposit(expand_bits(rep.bits, static_cast<std::size_t>(credit)));
        }
        accumulated += credit;
        ++res.harvests;
        res.transcript.push_back({t, PowerEvent::Kind::harvest, credit});
        power_off(tag, t);
        res.transcript.push_back({t, PowerEvent::Kind::power_off, 0});
        const bool more = accumulated < profile_bits;
        if (more || convention == WaitConvention::per) {
            res.transcript.push_back({t, PowerEvent::Kind::wait, 0});
            t += cooldown_s;
            res.sim_wall_time_s += cooldown_s;
        }
        if (!more) break;
    }
    tag.clock_s = t;
    return res;
}

/// Adversarial loop: one power-up, then repeated harvests with no power
/// loss in between. Memory never re-randomizes, so outputs repeat.
inline std::vector<BitVec> continuous_power_attack(TagState& tag, const PhConfig& cfg,
                                                   int queries) {
    if (queries < 1) throw ConstraintError("continuous_power_attack: queries must be >= 1");
    if (!tag.powered) power_on(tag, tag.clock_s);
    std::vector<BitVec> out;
    out.reserve(static_cast<std::size_t>(queries));
    for (int q = 0; q < queries; ++q) out.push_back(harvest(tag, cfg).bits);
    return out;
}

struct DosResult {
    bool starved = false;
};

/// Each attacker query re-powers the tag and resets its decay clock, so the
/// tag is starved of fresh entropy exactly when queries come faster than the
/// cooldown (strictly: a period equal to the cooldown still permits harvests).
inline DosResult dos_window(double cooldown_s, double attacker_query_period_s) {
    if (!(cooldown_s > 0.0) || !(attacker_query_period_s > 0.0))
        throw ConstraintError("dos_window: inputs must be positive");
    return DosResult{attacker_query_period_s < cooldown_s};
}

/// Line-oriented round transcript: index,a,b,z.
inline std::string format_rounds(const std::vector<RoundRecord>& rounds) {
    std::ostringstream os;
    for (std::size_t i = 0; i < rounds.size(); ++i)
        os << i << ',' << rounds[i].a.to_hex() << ',' << rounds[i].b.to_hex() << ',' << rounds[i].z
           << '\n';
    return os.str();
}

inline std::string format_transcript(const std::vector<PowerEvent>& events) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    for (const PowerEvent& e : events) {
        os << "t=" << e.at_s << ' ';
        switch (e.kind) {
            case PowerEvent::Kind::power_on: os << "power_on"; break;
            case PowerEvent::Kind::harvest: os << "harvest " << e.bits << " bits"; break;
            case PowerEvent::Kind::power_off: os << "power_off"; break;
            case PowerEvent::Kind::wait: os << "wait"; break;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace ramrng
