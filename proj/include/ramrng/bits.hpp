#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ramrng/errors.hpp"

namespace ramrng {

/// Unsigned integer wide enough for every hash output width used here (max 133 bits).
using WideUint = boost::multiprecision::uint256_t;

/// Packed bit string. Bit 0 is the most significant bit of byte 0, i.e. the
/// serialization order is MSB-first throughout (words, hex, concatenation).
class BitVec {
public:
    BitVec() = default;

    /// n zero bits.
    explicit BitVec(std::size_t n) : n_(n), bytes_((n + 7) / 8, 0) {}

    /// Parse a string of '0'/'1' characters.
    static BitVec from_string(std::string_view bits) {
        BitVec v;
        v.reserve(bits.size());
        for (char c : bits) {
            if (c != '0' && c != '1') throw BoundsError("BitVec::from_string: expected '0' or '1'");
            v.push_back(c == '1');
        }
        return v;
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    void reserve(std::size_t n) { bytes_.reserve((n + 7) / 8); }

    bool get(std::size_t i) const {
        assert(i < n_);
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
    }

    void set(std::size_t i, bool v) {
        assert(i < n_);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    void push_back(bool v) {
        if (n_ % 8 == 0) bytes_.push_back(0);
        ++n_;
        if (v) set(n_ - 1, true);
    }

    void append(const BitVec& other) {
        for (std::size_t i = 0; i < other.size(); ++i) push_back(other.get(i));
    }

    /// Append the low `width` bits of `value`, most significant first.
    void append_uint(std::uint64_t value, unsigned width) {
        assert(width <= 64);
        for (unsigned i = width; i-- > 0;) push_back((value >> i) & 1u);
    }

    void append_uint(const WideUint& value, unsigned width) {
        for (unsigned i = width; i-- > 0;) push_back(static_cast<bool>(bit_test(value, i)));
    }

    /// Read `width` (<= 64) bits starting at `offset` as an MSB-first word.
    std::uint64_t word(std::size_t offset, unsigned width) const {
        assert(width <= 64 && offset + width <= n_);
        std::uint64_t w = 0;
        for (unsigned i = 0; i < width; ++i) w = (w << 1) | (get(offset + i) ? 1u : 0u);
        return w;
    }

    BitVec slice(std::size_t offset, std::size_t len) const {
        if (offset + len > n_) throw BoundsError("BitVec::slice: range out of bounds");
        BitVec out;
        out.reserve(len);
        for (std::size_t i = 0; i < len; ++i) out.push_back(get(offset + i));
        return out;
    }

    /// Replace bits [offset, offset + src.size()) with src.
    void overwrite(std::size_t offset, const BitVec& src) {
        if (offset + src.size() > n_) throw BoundsError("BitVec::overwrite: range out of bounds");
        for (std::size_t i = 0; i < src.size(); ++i) set(offset + i, src.get(i));
    }

    std::size_t count_ones() const {
        std::size_t ones = 0;
        for (std::size_t b = 0; b < bytes_.size(); ++b) ones += std::popcount(unsigned(bytes_[b]));
        // do not count padding in the final partial byte (always zero by construction)
        return ones;
    }

    /// Uppercase hex, MSB-first; a final partial nibble is zero-padded on the right.
    std::string to_hex() const {
        static const char* digits = "0123456789ABCDEF";
        std::string s;
        s.reserve((n_ + 3) / 4);
        for (std::size_t i = 0; i < n_; i += 4) {
            unsigned nib = 0;
            for (unsigned j = 0; j < 4; ++j) nib = (nib << 1) | (i + j < n_ && get(i + j) ? 1u : 0u);
            s.push_back(digits[nib]);
        }
        return s;
    }

    std::string to_string01() const {
        std::string s;
        s.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) s.push_back(get(i) ? '1' : '0');
        return s;
    }

    friend bool operator==(const BitVec& a, const BitVec& b) {
        return a.n_ == b.n_ && a.bytes_ == b.bytes_;
    }
    friend bool operator!=(const BitVec& a, const BitVec& b) { return !(a == b); }

    /// Packed bytes, for seeding downstream generators.
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bytes_;
};

/// Fraction of positions where a and b differ. Lengths must match and be nonzero.
inline double hamming_fraction(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) throw ConstraintError("hamming_fraction: length mismatch");
    if (a.empty()) throw ConstraintError("hamming_fraction: empty input");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += a.get(i) != b.get(i);
    return static_cast<double>(diff) / static_cast<double>(a.size());
}

}  // namespace ramrng
