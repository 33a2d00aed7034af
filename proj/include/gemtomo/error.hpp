#pragma once

#include <stdexcept>
#include <string>

namespace gemtomo {

/// Invalid arguments, inconsistent grids, malformed configuration.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Optimizer or fit failed to produce a usable answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File missing, unreadable, or not in the expected format.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

} // namespace gemtomo
