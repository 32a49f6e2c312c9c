// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <utility>

namespace motionfield::agent::detail {

/// (file stem, file contents) of every file under templates/, generated at configure time.
std::span<const std::pair<std::string_view, std::string_view>> embedded_templates();

}  // namespace motionfield::agent::detail
