// SPDX-License-Identifier: Apache-2.0
#pragma once

// Little-endian scalar packing shared by the binary readers/writers.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace motionfield::io::detail {

static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}
inline void put_i32(std::vector<std::uint8_t>& out, std::int32_t value) { put_u32(out, static_cast<std::uint32_t>(value)); }
inline void put_f32(std::vector<std::uint8_t>& out, float value) { put_u32(out, std::bit_cast<std::uint32_t>(value)); }

inline std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) value |= std::uint32_t{bytes[offset + static_cast<std::size_t>(i)]} << (8 * i);
    return value;
}
inline std::int32_t get_i32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return static_cast<std::int32_t>(get_u32(bytes, offset));
}
inline float get_f32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return std::bit_cast<float>(get_u32(bytes, offset));
}

}  // namespace motionfield::io::detail
