// SPDX-License-Identifier: Apache-2.0

#include "motionfield/flow_compose.hpp"
#include "motionfield/parallel.hpp"

#include "motionfield/simd/kernels.hpp"
#include "pixel_kernels.hpp"

namespace motionfield {
namespace {

void check_shapes(const DepthMap& depth, const Intrinsics& k, const FlowField& flow) {
    require(depth.width() == k.width() && depth.height() == k.height(), ErrorKind::dimension_mismatch,
            "depth map does not match intrinsics");
    require(flow.du.same_shape(depth.values()) && flow.dv.same_shape(depth.values()) &&
                flow.valid.same_shape(depth.values()),
            ErrorKind::dimension_mismatch, "object flow does not match depth map");
}

}  // namespace

PointGrid object_offsets(const DepthMap& depth, const Intrinsics& intrinsics, const FlowField& object_flow) {
    check_shapes(depth, intrinsics, object_flow);
    const int w = depth.width();
    const int h = depth.height();
    PixelGrid source = PixelGrid::pixel_centers(w, h);
    PixelGrid moved(w, h);
    for (std::size_t i = 0; i < moved.u.size(); ++i) {
        moved.u[i] = source.u[i] + object_flow.du[i];
        moved.v[i] = source.v[i] + object_flow.dv[i];
        moved.valid[i] = object_flow.valid[i];
    }
    const PointGrid p0 = unproject(source, depth, intrinsics);
    const PointGrid p1 = unproject(moved, depth, intrinsics);
    PointGrid offsets(w, h);
    for (std::size_t i = 0; i < offsets.x.size(); ++i) {
        if (p0.valid[i] != 0 && p1.valid[i] != 0) {
            offsets.x[i] = p1.x[i] - p0.x[i];
            offsets.y[i] = p1.y[i] - p0.y[i];
            offsets.z[i] = p1.z[i] - p0.z[i];
            offsets.valid[i] = 1;
        }
    }
    return offsets;
}

FlowField compose_frame(const DepthMap& depth, const Intrinsics& intrinsics, const FlowField& object_flow,
                        const Extrinsics& extrinsics, Mask* out_of_frame, Grid<double>* camera_depth) {
    check_shapes(depth, intrinsics, object_flow);
    const int w = depth.width();
    const int h = depth.height();
    FlowField out(w, h);
    Mask oob(w, h, 0);
    Grid<double> z(w, h, 0.0);

    simd::ComposeRowArgs args{};
    args.n = static_cast<std::size_t>(w);
    args.camera = detail::pinhole(intrinsics);
    args.pose = detail::rigid(extrinsics);
    args.min_depth = kMinCameraDepth;
    args.width = w;
    args.height = h;
    const simd::KernelTable& k = simd::kernels();
    for (int y = 0; y < h; ++y) {
        args.v = y;
        args.depth = depth.values().row(y).data();
        args.object_du = object_flow.du.row(y).data();
        args.object_dv = object_flow.dv.row(y).data();
        args.object_valid = object_flow.valid.row(y).data();
        args.du = out.du.row(y).data();
        args.dv = out.dv.row(y).data();
        args.z = z.row(y).data();
        args.valid = out.valid.row(y).data();
        args.out_of_frame = oob.row(y).data();
        k.compose_row(args);
    }
    if (out_of_frame != nullptr) *out_of_frame = std::move(oob);
    if (camera_depth != nullptr) *camera_depth = std::move(z);
    return out;
}

UnifiedFlow compose_unified_flow(const ComposeInput& input) {
    require(!input.extrinsics.empty(), ErrorKind::invalid_argument, "compose: need at least one frame");
    require(input.object_flows.size() == input.extrinsics.size(), ErrorKind::dimension_mismatch,
            "compose: " + std::to_string(input.object_flows.size()) + " object flows vs " +
                std::to_string(input.extrinsics.size()) + " extrinsics");
    UnifiedFlow result;
    const std::size_t frames = input.extrinsics.size();
    result.flows.resize(frames);
    result.out_of_frame.resize(frames);
    result.camera_depth.resize(frames);
    parallel_for(frames, [&](std::size_t k) {
        result.flows[k] = compose_frame(input.depth, input.intrinsics, input.object_flows[k], input.extrinsics[k],
                                        &result.out_of_frame[k], &result.camera_depth[k]);
    });
    return result;
}

}  // namespace motionfield
