#pragma once

#include <stdexcept>
#include <string>

namespace pqspace {

// Error taxonomy shared by the C++ core and the C API status codes.
//   invalid_argument - structural misuse (shape mismatch, bad parameter)
//   domain           - input is well-formed but outside what the operation
//                      supports (e.g. space too large for exact enumeration)
//   parse            - malformed file content
//   io               - filesystem failures
enum class ErrorKind {
    invalid_argument,
    domain,
    parse,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace pqspace
