// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "motionfield/image.hpp"
#include "motionfield/io/file.hpp"

namespace motionfield::io {

/// Any PNG, converted to 8-bit RGB (alpha composited over black).
RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes);
/// Any PNG, converted to 8-bit gray.
Grid<std::uint8_t> decode_png_gray8(std::span<const std::uint8_t> bytes);
/// 16-bit grayscale PNG, values untouched. Other layouts are rejected.
Grid<std::uint16_t> decode_png_gray16(std::span<const std::uint8_t> bytes);

Bytes encode_png(const RgbImage& image);
Bytes encode_png(const Grid<std::uint8_t>& gray);
Bytes encode_png(const Grid<std::uint16_t>& gray);

RgbImage read_png_rgb(const std::filesystem::path& path);
/// Nonzero pixels are inside the mask.
Mask read_mask(const std::filesystem::path& path);

template <class Image>
void write_png(const Image& image, const std::filesystem::path& path) {
    write_file_atomic(path, encode_png(image));
}

}  // namespace motionfield::io
