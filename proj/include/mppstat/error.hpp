#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mppstat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's contract.
class InputError : public Error {
public:
    using Error::Error;
};

/// A computation produced a non-finite or otherwise unusable number.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::size_t first = npos, std::size_t second = npos)
        : Error(what), first_(first), second_(second) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Indices of the offending point pair, when the error concerns one.
    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

/// A model has no closed-form moments; use a Monte Carlo oracle instead.
class UnsupportedSpecError : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace mppstat
