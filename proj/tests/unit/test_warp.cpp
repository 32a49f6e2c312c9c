// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "motionfield/camera_path.hpp"
#include "motionfield/warp_preview.hpp"
#include "test_support.hpp"

using namespace motionfield;
using namespace motionfield::testing;

namespace {

double channel_ncc(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= a.size();
    mb /= b.size();
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

}  // namespace

TEST_CASE("zero flow is the identity") {
    const RgbImage src = textured_image(40, 30);
    const Frame f = forward_warp(src, FlowField(40, 30), {});
    CHECK(f.rgb == src);
    CHECK(hole_fraction(f) == 0.0);
}

TEST_CASE("integer shift") {
    const RgbImage src = textured_image(40, 30);
    FlowField flow(40, 30);
    flow.du.fill(5.0);
    const Frame f = forward_warp(src, flow, {});
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 40; ++x) {
            if (x < 5) {
                CHECK(f.hole_mask(x, y) == 1);
            } else {
                REQUIRE(f.hole_mask(x, y) == 0);
                CHECK(f.rgb(x, y) == src(x - 5, y));
            }
        }
    }
    CHECK(hole_fraction(f) == doctest::Approx(5.0 / 40.0));
}

TEST_CASE("collisions resolve by depth, then row-major order") {
    RgbImage src(4, 1);
    src(0, 0) = {255, 0, 0};
    src(1, 0) = {0, 255, 0};
    src(2, 0) = {0, 0, 255};
    FlowField flow(4, 1);
    flow.du(0, 0) = 3.0;
    flow.du(1, 0) = 2.0;
    Grid<double> depth(4, 1, 1.0);
    depth(3, 0) = 9.0;  // stays put; must lose to both movers
    depth(0, 0) = 5.0;
    depth(1, 0) = 2.0;
    Frame f = forward_warp(src, flow, depth);
    CHECK(f.rgb(3, 0) == src(1, 0));

    depth(0, 0) = 2.0;
    depth(1, 0) = 5.0;
    f = forward_warp(src, flow, depth);
    CHECK(f.rgb(3, 0) == src(0, 0));

    f = forward_warp(src, flow, {});
    CHECK(f.rgb(3, 0) == src(0, 0));
}

TEST_CASE("rounding and invalid pixels") {
    const RgbImage src = textured_image(6, 1);
    FlowField flow(6, 1);
    flow.du(0, 0) = 1.49;  // lands on 1
    flow.du(2, 0) = 0.5;   // 2.5 rounds up to 3
    flow.du(4, 0) = 9.0;   // leaves the image
    flow.valid(5, 0) = 0;
    const Frame f = forward_warp(src, flow, {});
    CHECK(f.rgb(1, 0) == src(0, 0));
    CHECK(f.rgb(3, 0) == src(2, 0));
    CHECK(f.hole_mask(0, 0) == 1);
    CHECK(f.hole_mask(2, 0) == 1);
    CHECK(f.hole_mask(4, 0) == 1);
    CHECK(f.hole_mask(5, 0) == 1);
}

TEST_CASE("hole filling keeps the hole mask") {
    const RgbImage src = textured_image(20, 10);
    FlowField flow(20, 10);
    flow.du.fill(3.0);
    const Frame plain = forward_warp(src, flow, {});
    const Frame filled = forward_warp(src, flow, {}, {true});
    CHECK(filled.hole_mask == plain.hole_mask);
    for (int y = 0; y < 10; ++y) {
        for (int x = 3; x < 20; ++x) CHECK(filled.rgb(x, y) == plain.rgb(x, y));
        CHECK(filled.rgb(0, y) == src(0, y));
    }
}

TEST_CASE("sequence of zero flows") {
    const RgbImage src = textured_image(16, 12);
    UnifiedFlow u;
    for (int k = 0; k < 24; ++k) u.flows.emplace_back(16, 12);
    const auto frames = render_sequence(src, u);
    REQUIRE(frames.size() == 24);
    for (const Frame& f : frames) CHECK(f.rgb == src);
    CHECK_THROWS_AS(render_sequence(src, UnifiedFlow{}), Error);
}

TEST_CASE("zoom preview matches a scaled resample") {
    const int w = 128, h = 128;
    RgbImage src(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = 127.5 + 60 * std::sin(x * 0.21) * std::cos(y * 0.17) + 60 * std::sin((x + y) * 0.05);
            src(x, y) = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(255 - v), 128};
        }
    }
    const Intrinsics k = Intrinsics::default_for(w, h);
    const DepthMap depth(w, h, 10.0);
    CameraMotionSpec zoom;
    zoom.z_translation = 0.2;
    const auto poses = generate_extrinsics(zoom, 10.0, 2);
    const std::vector<FlowField> none{FlowField(w, h), FlowField(w, h)};
    const UnifiedFlow u = compose_unified_flow({depth, k, none, poses});
    const auto frames = render_sequence(src, u, {true});

    // Scale factor d / (d - t_z) about the principal point.
    const double s = 10.0 / 8.0;
    std::vector<double> warped, oracle;
    for (int y = 32; y < 96; ++y) {
        for (int x = 32; x < 96; ++x) {
            const double sx = (x - k.cx()) / s + k.cx();
            const double sy = (y - k.cy()) / s + k.cy();
            const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0, fy = sy - y0;
            auto at = [&](int xx, int yy) { return static_cast<double>(src(xx, yy)[0]); };
            oracle.push_back((1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x0 + 1, y0)) +
                             fy * ((1 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1)));
            warped.push_back(frames[1].rgb(x, y)[0]);
        }
    }
    CHECK(channel_ncc(warped, oracle) > 0.9);
}
