// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "motionfield/grid.hpp"

namespace motionfield {

using Rgb = std::array<std::uint8_t, 3>;
using RgbImage = Grid<Rgb>;

}  // namespace motionfield
