// SPDX-License-Identifier: Apache-2.0

#include "motionfield/densify.hpp"

#include <cmath>

#include "motionfield/parallel.hpp"
#include "motionfield/simd/kernels.hpp"

namespace motionfield {

FlowField densify(const SparseMotion& sparse, int width, int height, double sigma) {
    require(width > 0 && height > 0, ErrorKind::invalid_argument, "densify: image size must be positive");
    require(std::isfinite(sigma) && sigma > 0.0, ErrorKind::invalid_argument, "densify: sigma must be positive");
    if (sparse.mask) {
        require(sparse.mask->same_shape(width, height), ErrorKind::dimension_mismatch,
                "densify: mask does not match image size");
    }

    const std::size_t n = sparse.anchors.size();
    std::vector<double> au(n), av(n), adu(n), adv(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Anchor& a = sparse.anchors[i];
        require(a.pixel.allFinite() && a.displacement.allFinite(), ErrorKind::invalid_argument,
                "densify: non-finite anchor");
        require(a.pixel.x() >= 0.0 && a.pixel.x() < width && a.pixel.y() >= 0.0 && a.pixel.y() < height,
                ErrorKind::invalid_argument, "densify: anchor outside the image");
        au[i] = a.pixel.x();
        av[i] = a.pixel.y();
        adu[i] = a.displacement.x();
        adv[i] = a.displacement.y();
    }

    FlowField out(width, height);
    const double cutoff = kDensifyCutoffSigmas * sigma;
    simd::DensifyRowArgs args{};
    args.n = static_cast<std::size_t>(width);
    args.anchor_u = au.data();
    args.anchor_v = av.data();
    args.anchor_du = adu.data();
    args.anchor_dv = adv.data();
    args.anchor_count = n;
    args.neg_half_inv_sigma2 = -1.0 / (2.0 * sigma * sigma);
    args.cutoff2 = cutoff * cutoff;
    const simd::KernelTable& k = simd::kernels();
    for (int y = 0; y < height; ++y) {
        args.v = y;
        args.mask = sparse.mask ? sparse.mask->row(y).data() : nullptr;
        args.du = out.du.row(y).data();
        args.dv = out.dv.row(y).data();
        k.densify_row(args);
    }
    return out;
}

SparseMotion anchors_for_frame(const std::vector<std::vector<Eigen::Vector2d>>& paths, std::size_t frame,
                               const std::optional<Mask>& mask) {
    SparseMotion sparse;
    sparse.mask = mask;
    for (const auto& path : paths) {
        require(frame < path.size(), ErrorKind::invalid_argument, "trajectory shorter than requested frame");
        sparse.anchors.push_back({path.front(), path[frame] - path.front()});
    }
    return sparse;
}

std::vector<FlowField> densify_paths(const std::vector<std::vector<Eigen::Vector2d>>& paths, int frame_count,
                                     int width, int height, const std::optional<Mask>& mask, double sigma) {
    require(frame_count >= 1, ErrorKind::invalid_argument, "densify: need at least one frame");
    for (const auto& path : paths) {
        require(path.size() == static_cast<std::size_t>(frame_count), ErrorKind::dimension_mismatch,
                "densify: path has " + std::to_string(path.size()) + " positions for " + std::to_string(frame_count) +
                    " frames");
    }
    std::vector<FlowField> flows(static_cast<std::size_t>(frame_count));
    parallel_for(flows.size(), [&](std::size_t k) {
        flows[k] = paths.empty() ? FlowField(width, height) : densify(anchors_for_frame(paths, k, mask), width, height, sigma);
    });
    return flows;
}

}  // namespace motionfield
