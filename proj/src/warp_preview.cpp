// SPDX-License-Identifier: Apache-2.0

#include "motionfield/warp_preview.hpp"
#include "motionfield/parallel.hpp"

#include <cmath>
#include <deque>

namespace motionfield {
namespace {

// Breadth-first fill from landed pixels, 4-connected, in row-major seed order.
void fill_from_nearest(RgbImage& rgb, const Mask& holes) {
    const int w = rgb.width();
    const int h = rgb.height();
    Mask done(w, h, 0);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (holes(x, y) == 0) {
                done(x, y) = 1;
                queue.emplace_back(x, y);
            }
        }
    }
    constexpr int kDx[] = {1, -1, 0, 0};
    constexpr int kDy[] = {0, 0, 1, -1};
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (int d = 0; d < 4; ++d) {
            const int nx = x + kDx[d];
            const int ny = y + kDy[d];
            if (done.contains(nx, ny) && done(nx, ny) == 0) {
                done(nx, ny) = 1;
                rgb(nx, ny) = rgb(x, y);
                queue.emplace_back(nx, ny);
            }
        }
    }
}

}  // namespace

Frame forward_warp(const RgbImage& source, const FlowField& flow, const Grid<double>& depth_proxy,
                   const WarpOptions& options) {
    const int w = source.width();
    const int h = source.height();
    require(flow.du.same_shape(w, h) && flow.dv.same_shape(w, h) && flow.valid.same_shape(w, h),
            ErrorKind::dimension_mismatch, "warp: flow does not match image size");
    const bool use_depth = !depth_proxy.empty();
    if (use_depth) {
        require(depth_proxy.same_shape(w, h), ErrorKind::dimension_mismatch,
                "warp: depth proxy does not match image size");
    }

    Frame frame;
    frame.rgb = RgbImage(w, h, Rgb{0, 0, 0});
    frame.hole_mask = Mask(w, h, 1);
    Grid<double> zbuffer(w, h, 0.0);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (flow.valid(x, y) == 0) continue;
            const double tu = std::floor(x + flow.du(x, y) + 0.5);
            const double tv = std::floor(y + flow.dv(x, y) + 0.5);
            if (!(tu >= 0.0 && tu < w && tv >= 0.0 && tv < h)) continue;
            const int tx = static_cast<int>(tu);
            const int ty = static_cast<int>(tv);
            const double z = use_depth ? depth_proxy(x, y) : 0.0;
            if (frame.hole_mask(tx, ty) != 0 || z < zbuffer(tx, ty)) {
                frame.rgb(tx, ty) = source(x, y);
                zbuffer(tx, ty) = z;
                frame.hole_mask(tx, ty) = 0;
            }
        }
    }
    if (options.fill_holes) {
        fill_from_nearest(frame.rgb, frame.hole_mask);
    }
    return frame;
}

std::vector<Frame> render_sequence(const RgbImage& source, const UnifiedFlow& unified, const WarpOptions& options) {
    require(!unified.flows.empty(), ErrorKind::invalid_argument, "render: no flow maps");
    std::vector<Frame> frames(unified.flows.size());
    const Grid<double> no_depth;
    parallel_for(frames.size(), [&](std::size_t k) {
        const Grid<double>& depth = k < unified.camera_depth.size() ? unified.camera_depth[k] : no_depth;
        frames[k] = forward_warp(source, unified.flows[k], depth, options);
    });
    return frames;
}

double hole_fraction(const Frame& frame) {
    if (frame.hole_mask.empty()) return 0.0;
    std::size_t holes = 0;
    for (const std::uint8_t m : frame.hole_mask.values()) holes += m != 0 ? 1 : 0;
    return static_cast<double>(holes) / static_cast<double>(frame.hole_mask.size());
}

}  // namespace motionfield
