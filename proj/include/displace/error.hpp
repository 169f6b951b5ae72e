#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace displace {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    enum class Kind { Syntax, UnknownIdentifier, Arity };

    ParseError(Kind kind, std::size_t position, std::vector<std::string> expected, const std::string& what)
        : Error(what), kind_(kind), position_(position), expected_(std::move(expected)) {}

    Kind kind() const noexcept { return kind_; }
    /// Byte offset into the source text.
    std::size_t position() const noexcept { return position_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    Kind kind_;
    std::size_t position_;
    std::vector<std::string> expected_;
};

/// Evaluation hit ln(<=0), sqrt(<0), x/0 or another NaN-producing operation.
class DomainError : public Error {
public:
    DomainError(std::string subexpression, const std::string& what)
        : Error(what), subexpression_(std::move(subexpression)) {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class MissingBinding : public Error {
public:
    using Error::Error;
};

/// A point was passed outside the domain of a displacement or gauge.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

class UnsupportedVariant : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Non-convergence or non-finite values inside a numerical routine.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::vector<double> diagnostics = {})
        : Error(what), diagnostics_(std::move(diagnostics)) {}

    const std::vector<double>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<double> diagnostics_;
};

} // namespace displace
