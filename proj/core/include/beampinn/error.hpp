#pragma once

#include <stdexcept>
#include <string>

namespace beampinn {

/// Raised when a loss, gradient or parameter update stops being finite.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for unreadable or malformed input files.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace beampinn
