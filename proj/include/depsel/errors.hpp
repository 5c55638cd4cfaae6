#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace depsel {

// Malformed input file content. line/column are 1-based; 0 means unknown.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(locate(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string locate(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string prefix = "line " + std::to_string(line);
        if (column != 0) prefix += ", column " + std::to_string(column);
        return prefix + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

// Caller passed arguments that violate an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A requirement with mean 0 or 1 has no finite latent threshold.
class DegenerateMarginalError : public ArgumentError {
public:
    explicit DegenerateMarginalError(const std::string& requirement)
        : ArgumentError("degenerate marginal for requirement '" + requirement +
                        "': selection frequency is 0 or 1"),
          requirement_(requirement) {}

    const std::string& requirement() const noexcept { return requirement_; }

private:
    std::string requirement_;
};

// Target joint probability lies outside the Frechet bounds of the marginals.
class InfeasibleCovarianceError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

} // namespace depsel
