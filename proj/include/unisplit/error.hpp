#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unisplit {

// Caller passed something malformed: wrong shapes, bad config, unknown names.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double condition = 0.0)
        : std::runtime_error(what), condition_(condition) {}
    // condition estimate for singular solves, 0 when not applicable
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// |u| blew past the overflow bound; step is the index of the step that did it.
class RunAborted : public std::runtime_error {
public:
    RunAborted(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace unisplit
