#pragma once

#include <stdexcept>
#include <string>

namespace renormlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation outside the admissible set of a node (pole, out of interval, critical point).
struct DomainError : Error {
    using Error::Error;
};

struct CriticalPointError : DomainError {
    using DomainError::DomainError;
};

// Intervals or error estimates fell below what the active backend can resolve.
struct PrecisionExhausted : Error {
    using Error::Error;
};

// A periodic orbit was found where an irrational rotation was expected.
struct RationalLock : Error {
    using Error::Error;
};

// Two objects that must share combinatorics do not.
struct CombinatorialMismatch : Error {
    using Error::Error;
};

struct NonRenormalizable : Error {
    using Error::Error;
};

// A root search found no sign change on its bracket.
struct BracketFailure : Error {
    using Error::Error;
};

struct HypothesisViolation : Error {
    using Error::Error;
};

}  // namespace renormlab
