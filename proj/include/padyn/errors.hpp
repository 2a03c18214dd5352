#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace padyn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad prime, digit out of range, mismatched primes, bad flag.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The requested output needs more base-p digits than are known.
class PrecisionError : public Error {
public:
    using Error::Error;
};

/// An exhaustive enumeration would exceed the configured table budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Malformed map expression or automaton file. `where` is a byte offset for
/// expressions and a 1-based line number for automaton files.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t where)
        : Error(what), where_(where) {}
    std::size_t where() const noexcept { return where_; }

private:
    std::size_t where_;
};

}  // namespace padyn
