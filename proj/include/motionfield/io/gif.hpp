// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>

#include "motionfield/image.hpp"
#include "motionfield/io/file.hpp"

namespace motionfield::io {

/// Looping animated GIF on a fixed 6x7x6 color cube (no dithering), so the
/// output depends only on the frames. `delay_cs` is the per-frame delay in
/// hundredths of a second.
Bytes encode_gif(std::span<const RgbImage> frames, int delay_cs = 8);

void write_gif(std::span<const RgbImage> frames, const std::filesystem::path& path, int delay_cs = 8);

/// Palette index used for a color.
std::uint8_t gif_palette_index(const Rgb& color);

}  // namespace motionfield::io
