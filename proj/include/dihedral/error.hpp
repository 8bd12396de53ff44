#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dihedral {

/// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed expressions, unknown model names, inconsistent
/// options. The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical stage of the pipeline failed. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t position)
        : InputError("syntax error at position " + std::to_string(position) + ": " + what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class EvalError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Continuation ran into a fold (or some other end of the solution branch).
class BranchEndError : public NumericalError {
public:
    BranchEndError(const std::string& what, double last_mu)
        : NumericalError(what), last_mu_(last_mu) {}

    /// Last parameter value at which the branch was still resolved.
    double last_mu() const noexcept { return last_mu_; }

private:
    double last_mu_;
};

/// A repeated root of sigma that does not define a Turing instability.
class NotTuringPointError : public NumericalError {
public:
    NotTuringPointError(const std::string& what, bool belyakov_devaney)
        : NumericalError(what), belyakov_devaney_(belyakov_devaney) {}

    /// True when the repeated root is positive (a Belyakov-Devaney point).
    bool belyakov_devaney() const noexcept { return belyakov_devaney_; }

private:
    bool belyakov_devaney_;
};

}  // namespace dihedral
