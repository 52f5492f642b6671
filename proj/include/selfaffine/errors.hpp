#ifndef SELFAFFINE_ERRORS_HPP
#define SELFAFFINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace selfaffine {

// Bad inputs: malformed configs, violated preconditions, invalid specs.
// Mapped to exit code 2 by the CLI.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds a configured budget (word counts, sample
// sizes). Mapped to exit code 3.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A solver failed to bracket or converge. Mapped to exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace selfaffine

#endif
