#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace washliq {

// Malformed input text. line is 1-based; 0 when not tied to a file line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Input parsed fine but violates a shape requirement (too many bars, mismatched dates).
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller-supplied parameters out of range.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace washliq
