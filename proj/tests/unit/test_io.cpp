// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "corpus.hpp"
#include "motionfield/camera_path.hpp"
#include "motionfield/io/depth_io.hpp"
#include "motionfield/io/extrinsics_io.hpp"
#include "motionfield/io/file.hpp"
#include "motionfield/io/flo.hpp"
#include "motionfield/io/gif.hpp"
#include "motionfield/io/json_formats.hpp"
#include "motionfield/io/png.hpp"
#include "test_support.hpp"

using namespace motionfield;
using namespace motionfield::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::usage;
}

/// Minimal GIF reader: every frame's palette indices.
std::vector<std::vector<std::uint8_t>> decode_gif_indices(const io::Bytes& g, int& width, int& height) {
    std::size_t pos = 0;
    auto u8 = [&]() { return g.at(pos++); };
    auto u16 = [&]() {
        const int lo = u8();
        return lo | (u8() << 8);
    };
    REQUIRE(std::string(g.begin(), g.begin() + 6) == "GIF89a");
    pos = 6;
    width = u16();
    height = u16();
    const int flags = u8();
    pos += 2;
    if (flags & 0x80) pos += 3 * (1u << ((flags & 7) + 1));

    std::vector<std::vector<std::uint8_t>> frames;
    for (;;) {
        const int block = u8();
        if (block == 0x3B) break;
        if (block == 0x21) {
            ++pos;
            for (int n = u8(); n != 0; n = u8()) pos += static_cast<std::size_t>(n);
            continue;
        }
        REQUIRE(block == 0x2C);
        pos += 4;
        const int w = u16(), h = u16();
        const int local = u8();
        REQUIRE((local & 0x80) == 0);
        const int min_size = u8();
        std::vector<std::uint8_t> data;
        for (int n = u8(); n != 0; n = u8()) {
            data.insert(data.end(), g.begin() + static_cast<std::ptrdiff_t>(pos),
                        g.begin() + static_cast<std::ptrdiff_t>(pos) + n);
            pos += static_cast<std::size_t>(n);
        }

        const int clear = 1 << min_size, end = clear + 1;
        std::vector<std::vector<std::uint8_t>> dict;
        auto reset = [&]() {
            dict.assign(static_cast<std::size_t>(end + 1), {});
            for (int i = 0; i < clear; ++i) dict[static_cast<std::size_t>(i)] = {static_cast<std::uint8_t>(i)};
        };
        reset();
        int size = min_size + 1;
        std::size_t bitpos = 0;
        auto read_code = [&]() {
            int code = 0;
            for (int b = 0; b < size; ++b, ++bitpos) {
                code |= ((data.at(bitpos / 8) >> (bitpos % 8)) & 1) << b;
            }
            return code;
        };
        std::vector<std::uint8_t> out;
        std::vector<std::uint8_t> prev;
        for (;;) {
            const int code = read_code();
            if (code == clear) {
                reset();
                size = min_size + 1;
                prev.clear();
                continue;
            }
            if (code == end) break;
            std::vector<std::uint8_t> entry;
            if (code < static_cast<int>(dict.size())) {
                entry = dict[static_cast<std::size_t>(code)];
            } else {
                REQUIRE(code == static_cast<int>(dict.size()));
                entry = prev;
                entry.push_back(prev.front());
            }
            out.insert(out.end(), entry.begin(), entry.end());
            if (!prev.empty() && dict.size() < 4096) {
                auto grown = prev;
                grown.push_back(entry.front());
                dict.push_back(grown);
            }
            prev = entry;
            if (static_cast<int>(dict.size()) == (1 << size) && size < 12) ++size;
        }
        REQUIRE(out.size() == static_cast<std::size_t>(w * h));
        frames.push_back(out);
    }
    return frames;
}

}  // namespace

TEST_CASE("flo round trip is bit exact") {
    Rng rng(17);
    FlowField f = random_flow(rng, 13, 7, 50);
    f.valid(3, 2) = 0;
    const io::Bytes bytes = io::encode_flo(f);
    CHECK(bytes.size() == 12 + 8 * 13 * 7);
    const FlowField g = io::decode_flo(bytes);
    CHECK(g.valid(3, 2) == 0);
    CHECK(g.valid(4, 2) == 1);
    for (std::size_t i = 0; i < f.du.size(); ++i) {
        if (f.valid[i] == 0) continue;
        CHECK(g.du[i] == static_cast<double>(static_cast<float>(f.du[i])));
    }
    // Re-encoding the decoded field reproduces the file byte for byte.
    CHECK(io::encode_flo(g) == bytes);

    TempDir dir;
    io::write_flo(f, dir / "a.flo");
    CHECK(io::read_file(dir / "a.flo") == bytes);
    CHECK_FALSE(std::filesystem::exists(dir / "a.flo.tmp"));
}

TEST_CASE("flo header layout") {
    FlowField f(2, 1);
    f.du(1, 0) = 1.5;
    const io::Bytes b = io::encode_flo(f);
    float tag = 0;
    std::memcpy(&tag, b.data(), 4);
    CHECK(tag == 202021.25f);
    std::int32_t w = 0;
    std::memcpy(&w, b.data() + 4, 4);
    CHECK(w == 2);
    float u1 = 0;
    std::memcpy(&u1, b.data() + 12 + 8, 4);
    CHECK(u1 == 1.5f);
}

TEST_CASE("malformed corpus raises typed errors") {
    const auto corpus = malformed_corpus();
    CHECK(corpus.size() == 10);
    for (const auto& c : corpus) {
        CAPTURE(c.name);
        const auto kind = decode_kind(c);
        REQUIRE(kind.has_value());
        CHECK(*kind == c.expected);
    }
}

TEST_CASE("read errors name the file") {
    TempDir dir;
    io::write_file_atomic(dir / "bad.flo", flo_bytes(0.0f, 1, 1, 2));
    try {
        (void)io::read_flo(dir / "bad.flo");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::bad_magic);
        CHECK(std::string(e.what()).find("bad.flo") != std::string::npos);
    }
    CHECK(kind_of([&] { (void)io::read_flo(dir / "missing.flo"); }) == ErrorKind::io);
}

TEST_CASE("extrinsics text format") {
    const auto id = io::parse_extrinsics("0 1 0 0 0 0 1 0 0 0 0 1 0");
    REQUIRE(id.size() == 1);
    CHECK(id[0].max_abs_difference(Extrinsics::identity()) == 0.0);

    const auto skipped = io::parse_extrinsics("# poses\n\n0 1 0 0 1 0 1 0 2 0 0 1 3\n");
    REQUIRE(skipped.size() == 1);
    CHECK(skipped[0].translation() == Eigen::Vector3d(1, 2, 3));

    CameraMotionSpec spec;
    spec.x_translation = 0.3;
    spec.y_rotation = 40;
    spec.z_rotation = 300;
    spec.motion_type = MotionType::decrement;
    const auto poses = generate_extrinsics(spec, 7.5, 24);
    TempDir dir;
    io::write_extrinsics(poses, dir / "cam.txt");
    const auto back = io::read_extrinsics(dir / "cam.txt");
    REQUIRE(back.size() == poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) CHECK(back[i].max_abs_difference(poses[i]) < 1e-9);
}

TEST_CASE("png round trips") {
    const RgbImage img = textured_image(19, 11);
    CHECK(io::decode_png_rgb(io::encode_png(img)) == img);

    Grid<std::uint8_t> gray(5, 4, 0);
    gray(2, 2) = 200;
    CHECK(io::decode_png_gray8(io::encode_png(gray)) == gray);

    Grid<std::uint16_t> deep(6, 3, 0);
    deep(1, 1) = 65535;
    deep(5, 2) = 1234;
    CHECK(io::decode_png_gray16(io::encode_png(deep)) == deep);
    CHECK_THROWS_AS(io::decode_png_gray16(io::encode_png(img)), Error);
    CHECK_THROWS_AS(io::decode_png_rgb(io::Bytes{1, 2, 3}), Error);

    TempDir dir;
    io::write_png(gray, dir / "mask.png");
    const Mask m = io::read_mask(dir / "mask.png");
    CHECK(m(2, 2) == 1);
    CHECK(m(0, 0) == 0);
}

TEST_CASE("depth files") {
    DepthMap d(7, 5, 2.5);
    d(1, 1) = 0.0;
    d(3, 2) = 11.125;
    const DepthMap back = io::decode_dpt(io::encode_dpt(d));
    CHECK(back.values() == d.values());
    io::Bytes bad = io::encode_dpt(d);
    bad[0] = 'X';
    CHECK(kind_of([&] { (void)io::decode_dpt(bad); }) == ErrorKind::bad_magic);
    bad = io::encode_dpt(d);
    bad.pop_back();
    CHECK(kind_of([&] { (void)io::decode_dpt(bad); }) == ErrorKind::truncated);

    TempDir dir;
    io::write_depth_png(d, dir / "d.png", 1000.0);
    CHECK(std::filesystem::exists(io::depth_sidecar_path(dir / "d.png")));
    const DepthMap png = io::read_depth(dir / "d.png");
    CHECK(png(1, 1) == 0.0);
    CHECK(png(3, 2) == doctest::Approx(11.125));
    CHECK(png(0, 0) == doctest::Approx(2.5));
    io::write_depth_dpt(d, dir / "d.dpt");
    CHECK(io::read_depth(dir / "d.dpt").values() == d.values());

    CHECK(kind_of([&] { io::write_depth_png(d, dir / "e.png", 10000.0); }) == ErrorKind::overflow);
    std::filesystem::remove(io::depth_sidecar_path(dir / "d.png"));
    CHECK_THROWS_AS(io::read_depth(dir / "d.png"), Error);
}

TEST_CASE("gif frames decode to the palette indices") {
    std::vector<RgbImage> frames{textured_image(23, 17), RgbImage(23, 17, Rgb{255, 0, 0})};
    // Large enough to force dictionary resets.
    RgbImage noise(200, 150);
    Rng rng(5);
    for (std::size_t i = 0; i < noise.size(); ++i) {
        noise[i] = {static_cast<std::uint8_t>(uniform_int(rng, 0, 255)), static_cast<std::uint8_t>(uniform_int(rng, 0, 255)),
                    static_cast<std::uint8_t>(uniform_int(rng, 0, 255))};
    }
    for (const auto& set : {frames, std::vector<RgbImage>{noise}}) {
        const io::Bytes g = io::encode_gif(set, 5);
        int w = 0, h = 0;
        const auto decoded = decode_gif_indices(g, w, h);
        REQUIRE(decoded.size() == set.size());
        CHECK(w == set[0].width());
        CHECK(h == set[0].height());
        for (std::size_t f = 0; f < set.size(); ++f) {
            bool same = true;
            for (std::size_t i = 0; i < set[f].size(); ++i) same = same && decoded[f][i] == io::gif_palette_index(set[f][i]);
            CHECK(same);
        }
    }
    CHECK(io::gif_palette_index({0, 0, 0}) != io::gif_palette_index({255, 255, 255}));
    CHECK_THROWS_AS(io::encode_gif(std::vector<RgbImage>{}), Error);
}

TEST_CASE("digests and encodings") {
    const std::string abc = "abc";
    const io::Bytes b(abc.begin(), abc.end());
    CHECK(io::sha256_hex(b) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::base64_encode(b) == "YWJj");
    CHECK(io::base64_encode(io::Bytes{}) == "");
}

TEST_CASE("json documents") {
    const Intrinsics k(500, 510, 320, 240, 640, 480);
    CHECK(io::intrinsics_from_json(io::to_json(k)) == k);
    CHECK_THROWS_AS(io::intrinsics_from_json(io::parse_json(R"({"fx": 1})", "k")), Error);

    CameraMotionSpec spec;
    spec.z_translation = -0.4;
    spec.x_rotation = 12;
    spec.motion_type = MotionType::increment;
    CHECK(io::camera_spec_from_json(io::to_json(spec)) == spec);
    io::Json bad = io::to_json(spec);
    bad["motion_type"] = "bouncy";
    CHECK(kind_of([&] { (void)io::camera_spec_from_json(bad); }) == ErrorKind::invalid_literal);
    bad = io::to_json(spec);
    bad["z_translation"] = 1.0;
    CHECK(kind_of([&] { (void)io::camera_spec_from_json(bad); }) == ErrorKind::range_violation);

    CHECK(kind_of([] { (void)io::parse_json("{", "x"); }) == ErrorKind::malformed);

    const auto doc = io::trajectory_document_from_json(io::parse_json(
        R"({"trajectories": [{"points": [{"area": 143, "subarea": "top-right"}, {"area": 33, "subarea": "bottom-right"}]},
                             {"pixels": [[1, 2], [3, 4]]}]})",
        "t"));
    CHECK_FALSE(doc.grid_given);
    REQUIRE(doc.trajectories.size() == 2);
    const auto control = io::resolve_control_points(doc, 2560, 1600);
    CHECK(control[0][0].x() == doctest::Approx(490.6666667));
    CHECK(control[1][1] == Eigen::Vector2d(3, 4));
    const auto again = io::trajectory_document_from_json(io::to_json(doc));
    CHECK(again.grid_given);
    CHECK(again.trajectories[0].grid_points == doc.trajectories[0].grid_points);

    SparseMotion s;
    s.anchors.push_back({{1.5, 2}, {-3, 4.25}});
    CHECK(io::sparse_motion_from_json(io::to_json(s)).anchors == s.anchors);
}

TEST_CASE("run metadata records inputs") {
    TempDir dir;
    io::write_text_atomic(dir / "in.txt", "abc");
    io::RunMetadata m;
    m.command = "compose";
    m.arguments = {"--frames", "3"};
    m.add_input(dir / "in.txt");
    const io::Json j = m.to_json();
    CHECK(j["command"] == "compose");
    CHECK(j["version"] == io::tool_version());
    CHECK(j["inputs"][(dir / "in.txt").string()]["sha256"] ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
