#pragma once

#include <stdexcept>
#include <string>

namespace nomf {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or stream. Carries the 1-based line (or record) number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Arguments violate a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace nomf
