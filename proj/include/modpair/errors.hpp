#pragma once

#include <stdexcept>
#include <string>

namespace modpair {

// Bad input: wrong variable set, out-of-range index, violated precondition.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested coefficient lies at or above the known precision.
// Distinct from a true zero.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Series inversion of an element that is not a unit.
struct NonUnitError : std::domain_error {
    using std::domain_error::domain_error;
};

// A point of the Cartan algebra lies on the fundamental-domain boundary.
struct BoundaryError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace modpair
