// SPDX-License-Identifier: Apache-2.0

#include "motionfield/flow_decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "motionfield/simd/kernels.hpp"
#include "pixel_kernels.hpp"

namespace motionfield {
namespace {

void check_flow_shape(const FlowField& f, int w, int h, const char* what) {
    require(f.du.same_shape(w, h) && f.dv.same_shape(w, h) && f.valid.same_shape(w, h),
            ErrorKind::dimension_mismatch, std::string(what) + " does not match image size");
}

}  // namespace

FlowField remove_camera_flow(const DecomposeInput& in) {
    const Intrinsics& k = in.intrinsics;
    const int w = k.width();
    const int h = k.height();
    require(w >= 2 && h >= 2, ErrorKind::invalid_argument, "decompose: image must be at least 2x2");
    require(in.depth0.width() == w && in.depth0.height() == h, ErrorKind::dimension_mismatch,
            "decompose: frame-0 depth does not match intrinsics");
    require(in.depth_k.width() == w && in.depth_k.height() == h, ErrorKind::dimension_mismatch,
            "decompose: frame-k depth does not match intrinsics");
    check_flow_shape(in.real_flow, w, h, "decompose: real flow");

    Grid<double> inverse_depth(w, h, 0.0);
    for (std::size_t i = 0; i < inverse_depth.size(); ++i) {
        const double d = in.depth_k.values()[i];
        inverse_depth[i] = DepthMap::is_valid_depth(d) ? 1.0 / d : 0.0;
    }
    Mask source_valid(w, h, 0);
    for (std::size_t i = 0; i < source_valid.size(); ++i) {
        source_valid[i] = (in.real_flow.valid[i] != 0 && DepthMap::is_valid_depth(in.depth0.values()[i])) ? 1 : 0;
    }

    FlowField out(w, h);
    simd::RemoveCameraRowArgs args{};
    args.n = static_cast<std::size_t>(w);
    args.inverse_depth = inverse_depth.data();
    args.depth_width = w;
    args.depth_height = h;
    args.camera = detail::pinhole(k);
    args.inverse_pose = detail::rigid(in.camera.inverse());
    args.min_depth = kMinCameraDepth;
    const simd::KernelTable& kernels = simd::kernels();
    for (int y = 0; y < h; ++y) {
        args.v = y;
        args.flow_du = in.real_flow.du.row(y).data();
        args.flow_dv = in.real_flow.dv.row(y).data();
        args.flow_valid = source_valid.row(y).data();
        args.du = out.du.row(y).data();
        args.dv = out.dv.row(y).data();
        args.valid = out.valid.row(y).data();
        kernels.remove_camera_row(args);
    }
    return out;
}

SparseMotion sparse_sample(const FlowField& f, int max_points, double nms_radius) {
    require(max_points >= 1, ErrorKind::invalid_argument, "sparse_sample: max_points must be at least 1");
    require(std::isfinite(nms_radius) && nms_radius >= 0.0, ErrorKind::invalid_argument,
            "sparse_sample: nms radius must be non-negative");
    const int w = f.width();
    check_flow_shape(f, w, f.height(), "sparse_sample: flow");

    std::vector<double> magnitude2(f.du.size(), 0.0);
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < f.du.size(); ++i) {
        if (f.valid[i] == 0) continue;
        const double m2 = f.du[i] * f.du[i] + f.dv[i] * f.dv[i];
        if (m2 > 0.0 && std::isfinite(m2)) {
            magnitude2[i] = m2;
            candidates.push_back(i);
        }
    }
    // candidates are in row-major order already; stable sort keeps that for ties.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return magnitude2[a] > magnitude2[b]; });

    SparseMotion out;
    const double r2 = nms_radius * nms_radius;
    for (const std::size_t i : candidates) {
        const Eigen::Vector2d p(static_cast<double>(i % static_cast<std::size_t>(w)),
                                static_cast<double>(i / static_cast<std::size_t>(w)));
        const bool suppressed = std::any_of(out.anchors.begin(), out.anchors.end(),
                                            [&](const Anchor& a) { return (a.pixel - p).squaredNorm() <= r2; });
        if (suppressed) continue;
        out.anchors.push_back({p, {f.du[i], f.dv[i]}});
        if (out.anchors.size() == static_cast<std::size_t>(max_points)) break;
    }
    return out;
}

FlowField render_anchors(const SparseMotion& sparse, int width, int height) {
    FlowField out(width, height);
    for (const Anchor& a : sparse.anchors) {
        const int x = static_cast<int>(std::lround(a.pixel.x()));
        const int y = static_cast<int>(std::lround(a.pixel.y()));
        require(out.du.contains(x, y), ErrorKind::invalid_argument, "anchor outside the image");
        out.du(x, y) = a.displacement.x();
        out.dv(x, y) = a.displacement.y();
    }
    return out;
}

void ReplacementPolicy::validate() const {
    require(std::isfinite(tau) && tau > 0.0, ErrorKind::invalid_argument, "replacement threshold must be positive");
}

double mean_epe(const FlowField& a, const FlowField& b, std::size_t* count) {
    const int w = a.width();
    const int h = a.height();
    check_flow_shape(a, w, h, "epe: first flow");
    check_flow_shape(b, w, h, "epe: second flow");
    double sum = 0.0;
    std::size_t n = 0;
    const simd::KernelTable& k = simd::kernels();
    for (int y = 0; y < h; ++y) {
        k.epe_accumulate(static_cast<std::size_t>(w), a.du.row(y).data(), a.dv.row(y).data(), a.valid.row(y).data(),
                         b.du.row(y).data(), b.dv.row(y).data(), b.valid.row(y).data(), &sum, &n);
    }
    if (count != nullptr) *count = n;
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

ReplacementDecision decide_replacement(const FlowField& unified, const FlowField& real,
                                       const ReplacementPolicy& policy) {
    policy.validate();
    ReplacementDecision decision;
    decision.mean_epe = mean_epe(unified, real, &decision.pixels);
    const bool within = std::isfinite(decision.mean_epe) && decision.mean_epe <= policy.tau;
    decision.source = (decision.pixels > 0 && within) ? FlowSource::unified : FlowSource::real;
    return decision;
}

FlowField threshold_replace(const FlowField& unified, const FlowField& real, const ReplacementPolicy& policy) {
    return decide_replacement(unified, real, policy).source == FlowSource::unified ? unified : real;
}

}  // namespace motionfield
