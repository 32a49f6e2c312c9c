// SPDX-License-Identifier: Apache-2.0
#pragma once

// Middlebury .flo: float32 tag 202021.25, int32 width, int32 height, then
// width*height interleaved (u, v) float32 samples, all little-endian.
// Unknown flow is stored as a component with |value| > 1e9 (or NaN).

#include <filesystem>

#include "motionfield/geometry.hpp"
#include "motionfield/io/file.hpp"

namespace motionfield::io {

inline constexpr float kFloTag = 202021.25f;
inline constexpr float kFloUnknown = 1e10f;

Bytes encode_flo(const FlowField& field);
FlowField decode_flo(std::span<const std::uint8_t> bytes);

FlowField read_flo(const std::filesystem::path& path);
void write_flo(const FlowField& field, const std::filesystem::path& path);

}  // namespace motionfield::io
