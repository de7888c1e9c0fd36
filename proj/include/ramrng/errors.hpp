#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ramrng {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter or configuration violates a documented invariant.
struct ConstraintError : Error {
    using Error::Error;
};

/// Simulation time would move backwards.
struct ClockError : Error {
    using Error::Error;
};

/// Operation issued while the tag is in the wrong power state.
struct PowerStateError : Error {
    using Error::Error;
};

/// Out-of-range index, length or word value.
struct BoundsError : Error {
    using Error::Error;
};

/// Wrong number of words supplied to the hash.
struct ArityError : Error {
    using Error::Error;
};

/// Input memory is too short to produce even one hash block.
struct InsufficientInputError : Error {
    using Error::Error;
};

/// The entropy pool cannot satisfy a draw request.
struct InsufficientEntropyError : Error {
    InsufficientEntropyError(const std::string& what, std::uint64_t requested,
                             std::uint64_t available, int rounds_completed = -1)
        : Error(what),
          requested_bits(requested),
          available_bits(available),
          rounds_completed(rounds_completed) {}

    std::uint64_t requested_bits;
    std::uint64_t available_bits;
    int rounds_completed;  // -1 when not raised from a protocol run
};

/// A supply/demand computation has no solution (e.g. zero bits per harvest).
struct InfeasibleError : Error {
    using Error::Error;
};

/// Curve fitting is impossible on the given samples.
struct FitError : Error {
    using Error::Error;
};

/// Bad command-line or config input.
struct UsageError : Error {
    using Error::Error;
};

}  // namespace ramrng
