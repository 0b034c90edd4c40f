#pragma once

#include <stdexcept>
#include <string>

namespace infogeo {

/// Unreadable or unwritable files, malformed manifests.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs that violate a documented precondition.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Failures of the numerics themselves (non-convergence, singular input).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace infogeo
