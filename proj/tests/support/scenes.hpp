// SPDX-License-Identifier: Apache-2.0
#pragma once

// Synthetic scenes for the compose/decompose round trip.
//
// Depth is piecewise constant, so each region is a fronto-parallel plane
// Z = d in frame-0 coordinates. Object motion keeps the source depth, so a
// moved point stays on its plane; frame-k depth at any pixel is then a
// ray/plane intersection and its inverse is affine in pixel coordinates.
// A source pixel "qualifies" when its target is inside the raster and the four
// depth samples around the target are seen only by its own plane.

#include <cmath>
#include <vector>

#include "motionfield/camera_path.hpp"
#include "motionfield/densify.hpp"
#include "motionfield/flow_compose.hpp"
#include "test_support.hpp"

namespace motionfield::testing {

struct Rect {
    int x0, y0, x1, y1;  // half-open
    double depth;
};

struct SceneSpec {
    int width = 256;
    int height = 192;
    double background = 12.0;
    std::vector<Rect> layers;
    std::vector<Anchor> anchors;  // object motion at the last frame, scaled linearly before that
    CameraMotionSpec camera;
    int frames = 6;
    double sigma = 20.0;
};

struct Scene {
    Intrinsics intrinsics{1, 1, 0, 0, 1, 1};
    DepthMap depth0;
    std::vector<FlowField> object_flows;
    std::vector<Extrinsics> poses;
};

inline Scene build_scene(const SceneSpec& spec) {
    Scene s;
    s.intrinsics = Intrinsics::default_for(spec.width, spec.height);
    s.depth0 = DepthMap(spec.width, spec.height, spec.background);
    for (const Rect& r : spec.layers) {
        for (int y = r.y0; y < r.y1; ++y) {
            for (int x = r.x0; x < r.x1; ++x) s.depth0(x, y) = r.depth;
        }
    }
    for (int k = 0; k < spec.frames; ++k) {
        SparseMotion sparse;
        const double scale = spec.frames > 1 ? static_cast<double>(k) / (spec.frames - 1) : 0.0;
        for (const Anchor& a : spec.anchors) sparse.anchors.push_back({a.pixel, a.displacement * scale});
        s.object_flows.push_back(densify(sparse, spec.width, spec.height, spec.sigma));
    }
    s.poses = generate_extrinsics(spec.camera, s.depth0.max_valid(), spec.frames);
    return s;
}

/// Depth of plane Z = d (frame-0 coordinates) seen through pixel (u, v) of a
/// camera with world-to-camera pose e.
inline double plane_depth(double d, double u, double v, const Intrinsics& k, const Extrinsics& e) {
    const Eigen::Vector3d n = e.rotation().col(2);
    const Eigen::Vector3d ray((u - k.cx()) / k.fx(), (v - k.cy()) / k.fy(), 1.0);
    return (d + n.dot(e.translation())) / n.dot(ray);
}

struct FrameOracle {
    DepthMap depth_k;
    Mask qualifies;
    std::size_t qualifying = 0;
};

inline FrameOracle frame_oracle(const DepthMap& depth0, const Intrinsics& k, const FlowField& unified,
                                const Extrinsics& pose) {
    const int w = depth0.width();
    const int h = depth0.height();
    Grid<double> owner(w, h, 0.0);  // plane depth of the first source covering the pixel
    Mask conflict(w, h, 0);
    auto footprint = [&](int x, int y, int& x0, int& y0) {
        const double u1 = x + unified.du(x, y);
        const double v1 = y + unified.dv(x, y);
        if (!(u1 >= 0.0 && u1 <= w - 1 && v1 >= 0.0 && v1 <= h - 1)) return false;
        x0 = std::min(static_cast<int>(std::floor(u1)), w - 2);
        y0 = std::min(static_cast<int>(std::floor(v1)), h - 2);
        return true;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int x0 = 0, y0 = 0;
            if (!depth0.is_valid(x, y) || unified.valid(x, y) == 0 || !footprint(x, y, x0, y0)) continue;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    double& o = owner(x0 + dx, y0 + dy);
                    if (o == 0.0) {
                        o = depth0(x, y);
                    } else if (o != depth0(x, y)) {
                        conflict(x0 + dx, y0 + dy) = 1;
                        o = std::min(o, depth0(x, y));
                    }
                }
            }
        }
    }
    FrameOracle out{DepthMap(w, h, 0.0), Mask(w, h, 0), 0};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (owner(x, y) > 0.0) out.depth_k(x, y) = plane_depth(owner(x, y), x, y, k, pose);
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int x0 = 0, y0 = 0;
            if (!depth0.is_valid(x, y) || unified.valid(x, y) == 0 || !footprint(x, y, x0, y0)) continue;
            bool clean = true;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) clean = clean && conflict(x0 + dx, y0 + dy) == 0;
            }
            if (clean) {
                out.qualifies(x, y) = 1;
                ++out.qualifying;
            }
        }
    }
    return out;
}

/// Three scenes with different camera moves over a two-layer depth map.
inline std::vector<SceneSpec> round_trip_scenes() {
    SceneSpec base;
    base.layers = {{80, 60, 170, 130, 6.0}, {20, 140, 70, 180, 9.0}};
    base.anchors = {{{120, 95}, {4.0, -2.5}}, {{150, 80}, {-1.5, 3.0}}, {{45, 160}, {2.0, 1.0}}};

    std::vector<SceneSpec> out;
    SceneSpec zoom = base;
    zoom.camera.z_translation = -0.1;
    zoom.camera.motion_type = MotionType::increment;
    out.push_back(zoom);

    SceneSpec pan = base;
    pan.camera.x_translation = 0.004;
    pan.camera.y_translation = -0.003;
    pan.camera.z_rotation = 1.0;
    out.push_back(pan);

    SceneSpec orbit = base;
    orbit.camera.x_translation = -0.003;
    orbit.camera.y_rotation = 359.5;
    orbit.camera.x_rotation = 0.4;
    orbit.camera.motion_type = MotionType::decrement;
    out.push_back(orbit);
    return out;
}

}  // namespace motionfield::testing
