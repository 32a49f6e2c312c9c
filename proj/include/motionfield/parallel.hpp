// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace motionfield {

/// Runs body(i) for i in [0, count) on up to `max_threads` threads (0 = one
/// per hardware thread). Each index runs exactly once; results must not depend
/// on which thread ran it. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned max_threads = 0);

}  // namespace motionfield
