#pragma once

#include <stdexcept>
#include <string>

namespace marn {

// Base class for all simulator faults so callers can catch one type.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hermitian inversion hit a pivot below tolerance (degenerate draw).
struct SingularMatrix : SimError {
    using SimError::SimError;
};

// A channel realization produced an unusable denominator; the trial is
// discarded and counted, never retried with the same substream.
struct DegenerateChannel : SimError {
    using SimError::SimError;
};

// Exhaustive ML enumeration would exceed the candidate guard (2^20).
struct HypothesisSpaceTooLarge : SimError {
    using SimError::SimError;
};

// Not enough statistics to produce the requested estimate (slope fits,
// outage tails).  Maps to CLI exit code 3.
struct InsufficientData : SimError {
    using SimError::SimError;
};

// Invalid configuration (network shape, scheme/design pairing, CLI values).
// Maps to CLI exit code 2.
struct ConfigError : SimError {
    using SimError::SimError;
};

}  // namespace marn
