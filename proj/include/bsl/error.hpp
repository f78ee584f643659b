#pragma once

#include <stdexcept>
#include <string>

namespace bsl {

// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violated precondition on user input (bad dimensions, empty basis, ...).
struct PreconditionError : Error {
    using Error::Error;
};

// Work or memory would exceed a configured cap.
struct ResourceError : Error {
    using Error::Error;
};

// Query about an element that is not where it has to be (x outside a
// progression, point outside a lattice, ...).
struct MembershipError : Error {
    using Error::Error;
};

// A value does not fit the fast machine-word code path.
struct OverflowError : Error {
    using Error::Error;
};

// An internal invariant failed; indicates a bug, not bad input.
struct InvariantError : Error {
    using Error::Error;
};

} // namespace bsl
