// SPDX-License-Identifier: Apache-2.0

#include "motionfield/io/flo.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "binary.hpp"

namespace motionfield::io {
namespace {

constexpr std::size_t kHeaderBytes = 12;
constexpr std::int64_t kMaxPixels = std::int64_t{1} << 28;

bool is_unknown(float value) { return std::isnan(value) || std::fabs(value) > 1e9f; }

}  // namespace

Bytes encode_flo(const FlowField& field) {
    const int w = field.width();
    const int h = field.height();
    require(w > 0 && h > 0, ErrorKind::invalid_argument, "flo: empty flow field");
    Bytes out;
    out.reserve(kHeaderBytes + 8 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    detail::put_f32(out, kFloTag);
    detail::put_i32(out, w);
    detail::put_i32(out, h);
    for (std::size_t i = 0; i < field.du.size(); ++i) {
        float u = static_cast<float>(field.du[i]);
        float v = static_cast<float>(field.dv[i]);
        if (field.valid[i] == 0 && !is_unknown(u) && !is_unknown(v)) {
            u = kFloUnknown;
            v = kFloUnknown;
        }
        detail::put_f32(out, u);
        detail::put_f32(out, v);
    }
    return out;
}

FlowField decode_flo(std::span<const std::uint8_t> bytes) {
    require(bytes.size() >= 4, ErrorKind::truncated, "flo: missing tag");
    const float tag = detail::get_f32(bytes, 0);
    require(std::bit_cast<std::uint32_t>(tag) == std::bit_cast<std::uint32_t>(kFloTag), ErrorKind::bad_magic,
            "flo: bad tag");
    require(bytes.size() >= kHeaderBytes, ErrorKind::truncated, "flo: truncated header");
    const std::int32_t w = detail::get_i32(bytes, 4);
    const std::int32_t h = detail::get_i32(bytes, 8);
    require(w > 0 && h > 0, ErrorKind::malformed,
            "flo: invalid dimensions " + std::to_string(w) + "x" + std::to_string(h));
    const std::int64_t pixels = std::int64_t{w} * std::int64_t{h};
    require(pixels <= kMaxPixels, ErrorKind::overflow, "flo: dimensions too large");
    const std::size_t payload = static_cast<std::size_t>(pixels) * 8;
    require(bytes.size() - kHeaderBytes >= payload, ErrorKind::truncated,
            "flo: payload has " + std::to_string(bytes.size() - kHeaderBytes) + " bytes, expected " +
                std::to_string(payload));
    require(bytes.size() - kHeaderBytes == payload, ErrorKind::malformed, "flo: trailing bytes after payload");

    FlowField field(w, h);
    for (std::size_t i = 0; i < static_cast<std::size_t>(pixels); ++i) {
        const float u = detail::get_f32(bytes, kHeaderBytes + 8 * i);
        const float v = detail::get_f32(bytes, kHeaderBytes + 8 * i + 4);
        field.du[i] = u;
        field.dv[i] = v;
        field.valid[i] = (is_unknown(u) || is_unknown(v)) ? 0 : 1;
    }
    return field;
}

FlowField read_flo(const std::filesystem::path& path) {
    try {
        return decode_flo(read_file(path));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

void write_flo(const FlowField& field, const std::filesystem::path& path) {
    write_file_atomic(path, encode_flo(field));
}

}  // namespace motionfield::io
