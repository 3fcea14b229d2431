#pragma once

#include <stdexcept>
#include <string>

namespace tscausal {

// Base for every error raised by the library. Messages are meant for users,
// so they name the offending series, row, column or node.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace tscausal
