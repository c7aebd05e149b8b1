#pragma once

#include <stdexcept>
#include <string>

namespace windgrid {

// Error taxonomy maps onto CLI exit codes: input -> 2, numerical -> 3,
// integrity -> 4.
enum class ErrorKind {
    input,      // malformed/inconsistent user-supplied data or arguments
    numerical,  // solver divergence, singularities, degenerate fits
    integrity,  // manifest/hash mismatches, tampered outputs
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    static Error input(std::string msg) { return {ErrorKind::input, std::move(msg)}; }
    static Error numerical(std::string msg) { return {ErrorKind::numerical, std::move(msg)}; }
    static Error integrity(std::string msg) { return {ErrorKind::integrity, std::move(msg)}; }

private:
    ErrorKind kind_;
};

}  // namespace windgrid
