// SPDX-License-Identifier: Apache-2.0

#include "motionfield/io/gif.hpp"

#include <unordered_map>

#include "motionfield/error.hpp"

namespace motionfield::io {
namespace {

constexpr int kLevelsR = 6;
constexpr int kLevelsG = 7;
constexpr int kLevelsB = 6;
constexpr int kMinCodeSize = 8;
constexpr int kMaxCodes = 4096;

int quantize(std::uint8_t value, int levels) { return (value * (levels - 1) + 127) / 255; }

std::uint8_t level_value(int index, int levels) {
    return static_cast<std::uint8_t>((index * 255 + (levels - 1) / 2) / (levels - 1));
}

void put_u16(Bytes& out, int value) {
    out.push_back(static_cast<std::uint8_t>(value & 0xFF));
    out.push_back(static_cast<std::uint8_t>((value >> 8) & 0xFF));
}

class BitWriter {
public:
    explicit BitWriter(Bytes& out) : out_(out) {}

    void write(int code, int size) {
        acc_ |= static_cast<std::uint32_t>(code) << bits_;
        bits_ += size;
        while (bits_ >= 8) {
            push(static_cast<std::uint8_t>(acc_ & 0xFF));
            acc_ >>= 8;
            bits_ -= 8;
        }
    }

    void finish() {
        if (bits_ > 0) push(static_cast<std::uint8_t>(acc_ & 0xFF));
        flush_block();
        out_.push_back(0);
    }

private:
    void push(std::uint8_t byte) {
        block_.push_back(byte);
        if (block_.size() == 255) flush_block();
    }

    void flush_block() {
        if (block_.empty()) return;
        out_.push_back(static_cast<std::uint8_t>(block_.size()));
        out_.insert(out_.end(), block_.begin(), block_.end());
        block_.clear();
    }

    Bytes& out_;
    Bytes block_;
    std::uint32_t acc_ = 0;
    int bits_ = 0;
};

void lzw_encode(const std::vector<std::uint8_t>& indices, Bytes& out) {
    const int clear = 1 << kMinCodeSize;
    const int end = clear + 1;
    out.push_back(kMinCodeSize);
    BitWriter bits(out);

    std::unordered_map<std::uint32_t, int> table;
    int size = kMinCodeSize + 1;
    int next = end + 1;
    bits.write(clear, size);

    int prefix = indices.front();
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const std::uint32_t key = (static_cast<std::uint32_t>(prefix) << 8) | indices[i];
        if (const auto it = table.find(key); it != table.end()) {
            prefix = it->second;
            continue;
        }
        bits.write(prefix, size);
        table.emplace(key, next++);
        if (next == kMaxCodes) {
            bits.write(clear, size);
            table.clear();
            size = kMinCodeSize + 1;
            next = end + 1;
        } else if (next > (1 << size)) {
            ++size;
        }
        prefix = indices[i];
    }
    bits.write(prefix, size);
    bits.write(end, size);
    bits.finish();
}

}  // namespace

std::uint8_t gif_palette_index(const Rgb& color) {
    const int r = quantize(color[0], kLevelsR);
    const int g = quantize(color[1], kLevelsG);
    const int b = quantize(color[2], kLevelsB);
    return static_cast<std::uint8_t>((r * kLevelsG + g) * kLevelsB + b);
}

Bytes encode_gif(std::span<const RgbImage> frames, int delay_cs) {
    require(!frames.empty(), ErrorKind::invalid_argument, "gif: no frames");
    require(delay_cs >= 0 && delay_cs <= 0xFFFF, ErrorKind::invalid_argument, "gif: delay out of range");
    const int w = frames.front().width();
    const int h = frames.front().height();
    require(w > 0 && h > 0 && w <= 0xFFFF && h <= 0xFFFF, ErrorKind::invalid_argument, "gif: bad frame size");
    for (const auto& f : frames) {
        require(f.width() == w && f.height() == h, ErrorKind::dimension_mismatch, "gif: frame sizes differ");
    }

    Bytes out{'G', 'I', 'F', '8', '9', 'a'};
    put_u16(out, w);
    put_u16(out, h);
    out.push_back(0xF7);  // global table, 8 bits per channel, 256 entries
    out.push_back(0);
    out.push_back(0);
    for (int i = 0; i < 256; ++i) {
        if (i < kLevelsR * kLevelsG * kLevelsB) {
            out.push_back(level_value(i / (kLevelsG * kLevelsB), kLevelsR));
            out.push_back(level_value((i / kLevelsB) % kLevelsG, kLevelsG));
            out.push_back(level_value(i % kLevelsB, kLevelsB));
        } else {
            out.insert(out.end(), {0, 0, 0});
        }
    }
    // Loop forever.
    out.insert(out.end(), {0x21, 0xFF, 0x0B, 'N', 'E', 'T', 'S', 'C', 'A', 'P', 'E', '2', '.', '0', 0x03, 0x01, 0x00,
                           0x00, 0x00});

    std::vector<std::uint8_t> indices(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (const auto& frame : frames) {
        out.insert(out.end(), {0x21, 0xF9, 0x04, 0x00});
        put_u16(out, delay_cs);
        out.insert(out.end(), {0x00, 0x00});

        out.push_back(0x2C);
        put_u16(out, 0);
        put_u16(out, 0);
        put_u16(out, w);
        put_u16(out, h);
        out.push_back(0);

        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = gif_palette_index(frame[i]);
        lzw_encode(indices, out);
    }
    out.push_back(0x3B);
    return out;
}

void write_gif(std::span<const RgbImage> frames, const std::filesystem::path& path, int delay_cs) {
    write_file_atomic(path, encode_gif(frames, delay_cs));
}

}  // namespace motionfield::io
