#pragma once

#include <stdexcept>
#include <string>

namespace muzero {

/// Raised when shapes or settings do not fit together (dimension mismatch,
/// invalid configuration value).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an object is used in a state that forbids the operation,
/// e.g. stepping a terminal environment or sampling an empty buffer.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace muzero
