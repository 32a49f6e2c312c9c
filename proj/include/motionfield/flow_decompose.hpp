// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "motionfield/densify.hpp"
#include "motionfield/geometry.hpp"

namespace motionfield {

/// Real flow F^ (frame 0 -> k), depth of frames 0 and k, and the frame-k
/// world-to-camera extrinsics E^ (frame 0's camera is the world frame).
struct DecomposeInput {
    const FlowField& real_flow;
    const DepthMap& depth0;
    const DepthMap& depth_k;
    const Extrinsics& camera;
    const Intrinsics& intrinsics;
};

/// Object-only flow: I1 = I0 + F^; lift I1 with frame-k depth (bilinear in
/// inverse depth over the four neighbors), map back through E^-1, project into
/// frame 0 and subtract I0. Targets outside the depth raster, touching invalid
/// depth, or behind the camera come back invalid, as do pixels without valid
/// frame-0 depth.
FlowField remove_camera_flow(const DecomposeInput& input);

/// Greedy selection of the largest-magnitude valid flow pixels with
/// non-maximum suppression: a candidate within `nms_radius` (inclusive) of an
/// accepted anchor is dropped. Ties break by row-major order. Zero-magnitude
/// pixels are never selected.
SparseMotion sparse_sample(const FlowField& object_flow, int max_points, double nms_radius);

/// Field that is zero everywhere except at the anchors' (integer) pixels.
FlowField render_anchors(const SparseMotion& sparse, int width, int height);

inline constexpr double kDefaultReplaceThreshold = 5.0;

struct ReplacementPolicy {
    double tau = kDefaultReplaceThreshold;  // mean end-point error, pixels

    void validate() const;
};

/// Mean end-point error over jointly valid pixels; `count` receives their number.
double mean_epe(const FlowField& a, const FlowField& b, std::size_t* count = nullptr);

enum class FlowSource { unified, real };

struct ReplacementDecision {
    FlowSource source = FlowSource::real;
    double mean_epe = 0.0;
    std::size_t pixels = 0;
};

ReplacementDecision decide_replacement(const FlowField& unified, const FlowField& real,
                                       const ReplacementPolicy& policy);

/// Keeps the unified flow unless its mean EPE against the real flow exceeds
/// tau (strictly), in which case the real flow is returned. With no jointly
/// valid pixel the real flow is returned.
FlowField threshold_replace(const FlowField& unified, const FlowField& real, const ReplacementPolicy& policy);

}  // namespace motionfield
