// SPDX-License-Identifier: Apache-2.0
#pragma once

// One pose per line: "index r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2".
// Indices start at 0 and must be consecutive. Blank lines and lines starting
// with '#' are ignored.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "motionfield/geometry.hpp"

namespace motionfield::io {

/// Rotations further than this from orthonormal are rejected on read.
inline constexpr double kExtrinsicsOrthoTolerance = 1e-6;

std::string format_extrinsics(std::span<const Extrinsics> poses);
std::vector<Extrinsics> parse_extrinsics(std::string_view text);

std::vector<Extrinsics> read_extrinsics(const std::filesystem::path& path);
void write_extrinsics(std::span<const Extrinsics> poses, const std::filesystem::path& path);

}  // namespace motionfield::io
