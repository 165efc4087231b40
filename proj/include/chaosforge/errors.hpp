#pragma once
#include <stdexcept>
#include <string>

namespace chaosforge {

// maps to exit code 2
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// maps to exit code 3
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace chaosforge
