#pragma once

#include <stdexcept>
#include <string>

namespace resext {

/// An operation was called outside its documented domain.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The multiplier m of a ToricData is not a jumping number (no relevant divisor).
class NotAJumpError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// A quantity required to be positive (admissibility profile) is not.
class PositivityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical identity failed its cross-check tolerance.
class CrossCheckError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A quadrature could not reach its error target within budget.
class InconclusiveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace resext
