// SPDX-License-Identifier: Apache-2.0
#pragma once

// Depth maps travel either as raw "DPT1" files (magic, u32 width, u32 height,
// little-endian f32 row-major) or as 16-bit grayscale PNGs with a sidecar
// "<png path>.json" holding {"scale": S}; metric depth = raw / S and raw 0 is
// invalid.

#include <filesystem>

#include "motionfield/geometry.hpp"
#include "motionfield/io/file.hpp"

namespace motionfield::io {

Bytes encode_dpt(const DepthMap& depth);
DepthMap decode_dpt(std::span<const std::uint8_t> bytes);

DepthMap decode_depth_png(std::span<const std::uint8_t> png, double scale);

/// Picks the format from the file's leading bytes.
DepthMap read_depth(const std::filesystem::path& path);

void write_depth_dpt(const DepthMap& depth, const std::filesystem::path& path);
/// Writes the PNG and its sidecar. Depths that do not fit 16 bits at `scale` are rejected.
void write_depth_png(const DepthMap& depth, const std::filesystem::path& path, double scale);

std::filesystem::path depth_sidecar_path(const std::filesystem::path& png_path);

}  // namespace motionfield::io
