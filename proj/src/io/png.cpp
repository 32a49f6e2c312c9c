// SPDX-License-Identifier: Apache-2.0

#include "motionfield/io/png.hpp"

#include <cstring>
#include <png.h>

#include "motionfield/error.hpp"

namespace motionfield::io {
namespace {

class PngReader {
public:
    explicit PngReader(std::span<const std::uint8_t> bytes) {
        std::memset(&image_, 0, sizeof image_);
        image_.version = PNG_IMAGE_VERSION;
        require(!bytes.empty(), ErrorKind::truncated, "png: empty input");
        if (png_image_begin_read_from_memory(&image_, bytes.data(), bytes.size()) == 0) {
            fail(ErrorKind::malformed, std::string("png: ") + image_.message);
        }
        require(image_.width <= 1u << 15 && image_.height <= 1u << 15, ErrorKind::overflow, "png: image too large");
    }
    ~PngReader() { png_image_free(&image_); }
    PngReader(const PngReader&) = delete;
    PngReader& operator=(const PngReader&) = delete;

    png_image& image() { return image_; }

    template <class T>
    Grid<T> finish(png_uint_32 format) {
        image_.format = format;
        Grid<T> out(static_cast<int>(image_.width), static_cast<int>(image_.height));
        png_color black{0, 0, 0};
        if (png_image_finish_read(&image_, &black, out.data(), 0, nullptr) == 0) {
            fail(ErrorKind::malformed, std::string("png: ") + image_.message);
        }
        return out;
    }

private:
    png_image image_;
};

template <class T>
Bytes encode(const Grid<T>& grid, png_uint_32 format) {
    require(grid.width() > 0 && grid.height() > 0, ErrorKind::invalid_argument, "png: empty image");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(grid.width());
    image.height = static_cast<png_uint_32>(grid.height());
    image.format = format;
    png_alloc_size_t size = 0;
    if (png_image_write_to_memory(&image, nullptr, &size, 0, grid.data(), 0, nullptr) == 0) {
        fail(ErrorKind::io, std::string("png encode: ") + image.message);
    }
    Bytes out(size);
    if (png_image_write_to_memory(&image, out.data(), &size, 0, grid.data(), 0, nullptr) == 0) {
        fail(ErrorKind::io, std::string("png encode: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace

RgbImage decode_png_rgb(std::span<const std::uint8_t> bytes) {
    static_assert(sizeof(Rgb) == 3);
    PngReader reader(bytes);
    return reader.finish<Rgb>(PNG_FORMAT_RGB);
}

Grid<std::uint8_t> decode_png_gray8(std::span<const std::uint8_t> bytes) {
    PngReader reader(bytes);
    return reader.finish<std::uint8_t>(PNG_FORMAT_GRAY);
}

Grid<std::uint16_t> decode_png_gray16(std::span<const std::uint8_t> bytes) {
    PngReader reader(bytes);
    const png_uint_32 format = reader.image().format;
    // Only a linear single-channel source passes through without gamma conversion.
    require((format & PNG_FORMAT_FLAG_LINEAR) != 0 && (format & PNG_FORMAT_FLAG_COLOR) == 0 &&
                (format & PNG_FORMAT_FLAG_ALPHA) == 0,
            ErrorKind::malformed, "png: expected 16-bit grayscale");
    return reader.finish<std::uint16_t>(PNG_FORMAT_LINEAR_Y);
}

Bytes encode_png(const RgbImage& image) { return encode(image, PNG_FORMAT_RGB); }
Bytes encode_png(const Grid<std::uint8_t>& gray) { return encode(gray, PNG_FORMAT_GRAY); }
Bytes encode_png(const Grid<std::uint16_t>& gray) { return encode(gray, PNG_FORMAT_LINEAR_Y); }

RgbImage read_png_rgb(const std::filesystem::path& path) {
    try {
        return decode_png_rgb(read_file(path));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

Mask read_mask(const std::filesystem::path& path) {
    try {
        Mask mask = decode_png_gray8(read_file(path));
        for (auto& m : mask.values()) m = m != 0 ? 1 : 0;
        return mask;
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

}  // namespace motionfield::io
