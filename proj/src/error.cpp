// SPDX-License-Identifier: Apache-2.0

#include "motionfield/error.hpp"

namespace motionfield {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::io: return "io";
        case ErrorKind::bad_magic: return "bad_magic";
        case ErrorKind::truncated: return "truncated";
        case ErrorKind::overflow: return "overflow";
        case ErrorKind::malformed: return "malformed";
        case ErrorKind::non_orthonormal: return "non_orthonormal";
        case ErrorKind::missing_action: return "missing_action";
        case ErrorKind::unknown_function: return "unknown_function";
        case ErrorKind::arity_mismatch: return "arity_mismatch";
        case ErrorKind::range_violation: return "range_violation";
        case ErrorKind::invalid_literal: return "invalid_literal";
        case ErrorKind::unbound_placeholder: return "unbound_placeholder";
        case ErrorKind::round_cap: return "round_cap";
        case ErrorKind::backend: return "backend";
        case ErrorKind::usage: return "usage";
    }
    return "unknown";
}

}  // namespace motionfield
