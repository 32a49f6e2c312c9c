// SPDX-License-Identifier: Apache-2.0

#include "motionfield/io/extrinsics_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "motionfield/call_syntax.hpp"
#include "motionfield/error.hpp"
#include "motionfield/io/file.hpp"

namespace motionfield::io {
namespace {

std::string format_number(double value) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", value);
    return buf.data();
}

double parse_number(std::string_view token, std::size_t line_no) {
    double value = 0.0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    require(ec == std::errc{} && ptr == end && std::isfinite(value), ErrorKind::malformed,
            "line " + std::to_string(line_no) + ": bad number '" + std::string(token) + "'");
    return value;
}

std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

}  // namespace

std::string format_extrinsics(std::span<const Extrinsics> poses) {
    std::string out;
    for (std::size_t k = 0; k < poses.size(); ++k) {
        const auto& R = poses[k].rotation();
        const auto& t = poses[k].translation();
        out += std::to_string(k);
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) out += ' ' + format_number(R(r, c));
            out += ' ' + format_number(t(r));
        }
        out += '\n';
    }
    return out;
}

std::vector<Extrinsics> parse_extrinsics(std::string_view text) {
    std::vector<Extrinsics> poses;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        const auto fields = tokens(line);
        if (fields.empty() || fields.front().front() == '#') continue;
        require(fields.size() == 13, ErrorKind::malformed,
                "line " + std::to_string(line_no) + ": expected 13 fields, got " + std::to_string(fields.size()));

        const auto index = call_syntax::parse_integer(fields[0]);
        require(index && *index == static_cast<long long>(poses.size()), ErrorKind::malformed,
                "line " + std::to_string(line_no) + ": expected frame index " + std::to_string(poses.size()));

        Eigen::Matrix3d R;
        Eigen::Vector3d t;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) R(r, c) = parse_number(fields[1 + 4 * r + c], line_no);
            t(r) = parse_number(fields[4 + 4 * r], line_no);
        }
        const double err = orthonormality_error(R);
        require(err <= kExtrinsicsOrthoTolerance, ErrorKind::non_orthonormal,
                "line " + std::to_string(line_no) + ": rotation off by " + format_number(err));
        poses.push_back(Extrinsics::from_approximate(R, t, kExtrinsicsOrthoTolerance));
    }
    return poses;
}

std::vector<Extrinsics> read_extrinsics(const std::filesystem::path& path) {
    try {
        return parse_extrinsics(read_text_file(path));
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

void write_extrinsics(std::span<const Extrinsics> poses, const std::filesystem::path& path) {
    write_text_atomic(path, format_extrinsics(poses));
}

}  // namespace motionfield::io
