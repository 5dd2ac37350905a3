#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

/// Violated precondition or malformed input. Maps to CLI exit status 2.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A query outside the resolved part of the spectrum, or an infeasible target.
/// Also a precondition failure from the caller's point of view (exit status 2).
class OutOfRange : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A numerical procedure that did not converge or could not certify its result.
/// Maps to CLI exit status 3.
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gibbs
