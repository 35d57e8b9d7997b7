#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace anv {

/// Invalid configuration value or combination. Messages name the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to an operation (dimension or topology mismatch).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation called in a state where it is not allowed (stepping a finished
/// episode, for instance).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Fitness evaluation failed for one population slot.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(std::size_t slot, const std::string& what)
        : std::runtime_error("evaluation failed in slot " + std::to_string(slot) + ": " + what)
        , slot_(slot)
    {
    }

    std::size_t slot() const noexcept { return slot_; }

private:
    std::size_t slot_;
};

} // namespace anv
