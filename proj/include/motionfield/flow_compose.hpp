// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "motionfield/geometry.hpp"

namespace motionfield {

/// Inputs of the unified-flow composition: first-frame depth, intrinsics and,
/// per target frame, the object flow (frame 0 -> k) and the camera extrinsics.
struct ComposeInput {
    const DepthMap& depth;
    const Intrinsics& intrinsics;
    std::span<const FlowField> object_flows;
    std::span<const Extrinsics> extrinsics;
};

struct UnifiedFlow {
    std::vector<FlowField> flows;
    /// Valid pixels whose target lands outside [0, W) x [0, H).
    std::vector<Mask> out_of_frame;
    /// Camera-space Z of each moved point in frame k (0 where invalid); the
    /// preview renderer uses it for z-ordering.
    std::vector<Grid<double>> camera_depth;
};

/// 3D offsets from object motion with the moved point keeping its source depth:
/// O(p) = lift(p + f(p), D(p)) - lift(p, D(p)). The Z component is always 0.
PointGrid object_offsets(const DepthMap& depth, const Intrinsics& intrinsics, const FlowField& object_flow);

/// One target frame: P1 = lift(p) + O(p), I1 = project(E P1), F = I1 - p.
/// `out_of_frame` and `camera_depth` are optional outputs.
FlowField compose_frame(const DepthMap& depth, const Intrinsics& intrinsics, const FlowField& object_flow,
                        const Extrinsics& extrinsics, Mask* out_of_frame = nullptr,
                        Grid<double>* camera_depth = nullptr);

UnifiedFlow compose_unified_flow(const ComposeInput& input);

}  // namespace motionfield
