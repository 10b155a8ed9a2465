#pragma once

#include <stdexcept>
#include <string>

namespace talenti {

// Raised when an iterative or adaptive numerical procedure fails to reach its
// requested tolerance. Distinct from std::invalid_argument, which is used for
// contract violations on inputs.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace talenti
