// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace motionfield {

/// Failure classes surfaced by every module. The agent's rethinking step reports
/// these back to the backend, so action-parsing failures get distinct kinds.
enum class ErrorKind {
    invalid_argument,
    dimension_mismatch,
    io,
    bad_magic,
    truncated,
    overflow,
    malformed,
    non_orthonormal,
    missing_action,
    unknown_function,
    arity_mismatch,
    range_violation,
    invalid_literal,
    unbound_placeholder,
    round_cap,
    backend,
    usage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) {
        throw Error(kind, message);
    }
}

}  // namespace motionfield
