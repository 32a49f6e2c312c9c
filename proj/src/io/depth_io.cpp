// SPDX-License-Identifier: Apache-2.0

#include "motionfield/io/depth_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "binary.hpp"
#include "motionfield/error.hpp"
#include "motionfield/io/png.hpp"

namespace motionfield::io {
namespace {

constexpr char kDptMagic[4] = {'D', 'P', 'T', '1'};
constexpr std::size_t kDptHeader = 12;
constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 28;

bool has_prefix(std::span<const std::uint8_t> bytes, const void* prefix, std::size_t n) {
    return bytes.size() >= n && std::memcmp(bytes.data(), prefix, n) == 0;
}

double read_scale(const std::filesystem::path& png_path) {
    const auto sidecar = depth_sidecar_path(png_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(sidecar));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::malformed, sidecar.string() + ": " + e.what());
    }
    require(doc.is_object() && doc.contains("scale") && doc["scale"].is_number(), ErrorKind::malformed,
            sidecar.string() + ": missing numeric \"scale\"");
    return doc["scale"].get<double>();
}

}  // namespace

std::filesystem::path depth_sidecar_path(const std::filesystem::path& png_path) {
    std::filesystem::path p = png_path;
    p += ".json";
    return p;
}

Bytes encode_dpt(const DepthMap& depth) {
    require(depth.width() > 0 && depth.height() > 0, ErrorKind::invalid_argument, "dpt: empty depth map");
    Bytes out(kDptMagic, kDptMagic + 4);
    detail::put_u32(out, static_cast<std::uint32_t>(depth.width()));
    detail::put_u32(out, static_cast<std::uint32_t>(depth.height()));
    for (const double d : depth.values().values()) {
        detail::put_f32(out, DepthMap::is_valid_depth(d) ? static_cast<float>(d) : 0.0f);
    }
    return out;
}

DepthMap decode_dpt(std::span<const std::uint8_t> bytes) {
    require(bytes.size() >= 4, ErrorKind::truncated, "dpt: missing magic");
    require(has_prefix(bytes, kDptMagic, 4), ErrorKind::bad_magic, "dpt: bad magic");
    require(bytes.size() >= kDptHeader, ErrorKind::truncated, "dpt: truncated header");
    const std::uint32_t w = detail::get_u32(bytes, 4);
    const std::uint32_t h = detail::get_u32(bytes, 8);
    require(w > 0 && h > 0, ErrorKind::malformed, "dpt: zero dimension");
    require(w <= 1u << 20 && h <= 1u << 20 && std::uint64_t{w} * h <= kMaxPixels, ErrorKind::overflow,
            "dpt: dimensions too large");
    const std::size_t payload = std::size_t{w} * h * 4;
    require(bytes.size() - kDptHeader >= payload, ErrorKind::truncated, "dpt: truncated payload");
    require(bytes.size() - kDptHeader == payload, ErrorKind::malformed, "dpt: trailing bytes after payload");
    DepthMap depth(static_cast<int>(w), static_cast<int>(h));
    auto values = depth.values().values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = detail::get_f32(bytes, kDptHeader + 4 * i);
        values[i] = DepthMap::is_valid_depth(d) ? d : 0.0;
    }
    return depth;
}

DepthMap decode_depth_png(std::span<const std::uint8_t> png, double scale) {
    require(std::isfinite(scale) && scale > 0.0, ErrorKind::invalid_argument, "depth png: scale must be > 0");
    const Grid<std::uint16_t> raw = decode_png_gray16(png);
    DepthMap depth(raw.width(), raw.height());
    auto values = depth.values().values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = raw[i] / scale;
    return depth;
}

DepthMap read_depth(const std::filesystem::path& path) {
    try {
        const Bytes bytes = read_file(path);
        static constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
        if (has_prefix(bytes, kPngSignature, 8)) return decode_depth_png(bytes, read_scale(path));
        return decode_dpt(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

void write_depth_dpt(const DepthMap& depth, const std::filesystem::path& path) {
    write_file_atomic(path, encode_dpt(depth));
}

void write_depth_png(const DepthMap& depth, const std::filesystem::path& path, double scale) {
    require(std::isfinite(scale) && scale > 0.0, ErrorKind::invalid_argument, "depth png: scale must be > 0");
    Grid<std::uint16_t> raw(depth.width(), depth.height(), 0);
    const auto values = depth.values().values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!DepthMap::is_valid_depth(values[i])) continue;
        const double r = std::round(values[i] * scale);
        require(r <= 65535.0, ErrorKind::overflow, "depth png: depth exceeds 16-bit range at this scale");
        raw[i] = static_cast<std::uint16_t>(std::max(r, 1.0));
    }
    write_png(raw, path);
    nlohmann::json sidecar{{"scale", scale}};
    write_text_atomic(depth_sidecar_path(path), sidecar.dump(2) + "\n");
}

}  // namespace motionfield::io
