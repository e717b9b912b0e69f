#pragma once

#include <stdexcept>
#include <string>

namespace gelulab {

// Bad run description (flags, widths, hyperparameters). CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable, malformed or missing input data. CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gelulab
