#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace storder {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Half-open byte range [start, end) into an expression's source text.
struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, SourceSpan span)
        : Error(what + " at " + std::to_string(span.start) + ".." + std::to_string(span.end)),
          span_(span) {}
    SourceSpan span() const noexcept { return span_; }

private:
    SourceSpan span_;
};

/// Evaluation left the real domain (ln of non-positive, division by zero, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& what, SourceSpan span)
        : Error(what + " at " + std::to_string(span.start) + ".." + std::to_string(span.end)),
          span_(span) {}
    SourceSpan span() const noexcept { return span_; }

private:
    SourceSpan span_;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double last_estimate, double last_error)
        : Error(what), estimate_(last_estimate), error_(last_error) {}
    double last_estimate() const noexcept { return estimate_; }
    double last_error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// Target value outside the range spanned by a bracketing interval.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A function failed a grid-based validation (endpoints, monotonicity, ...).
/// `witness` is the abscissa where the failure was observed.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, double witness)
        : Error(what + " (witness " + std::to_string(witness) + ")"), witness_(witness) {}
    double witness() const noexcept { return witness_; }

private:
    double witness_;
};

class DegenerateDensityError : public Error {
public:
    using Error::Error;
};

class InfiniteMeanError : public Error {
public:
    using Error::Error;
};

}  // namespace storder
