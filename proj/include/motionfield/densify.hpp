// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "motionfield/geometry.hpp"

namespace motionfield {

inline constexpr double kDefaultDensifySigma = 20.0;

/// Anchor support ends at this many sigmas.
inline constexpr double kDensifyCutoffSigmas = 5.0;

struct Anchor {
    Eigen::Vector2d pixel;
    Eigen::Vector2d displacement;

    bool operator==(const Anchor&) const = default;
};

struct SparseMotion {
    std::vector<Anchor> anchors;
    std::optional<Mask> mask;  // nonzero = inside; flow outside is zero
};

/// Gaussian-weighted spread of anchor displacements,
///   F(p) = sum_i w_i(p) f_i / max(1, sum_i w_i(p)),  w_i = exp(-|p - x_i|^2 / 2 sigma^2),
/// with w_i = 0 beyond 5 sigma. A lone anchor reproduces its displacement at its
/// own pixel and decays smoothly to zero; overlapping anchors blend. Every
/// output pixel is valid.
FlowField densify(const SparseMotion& sparse, int width, int height, double sigma = kDefaultDensifySigma);

/// Anchors for frame k of a set of trajectories: anchored at each path's frame-0
/// position with displacement positions[k] - positions[0].
SparseMotion anchors_for_frame(const std::vector<std::vector<Eigen::Vector2d>>& paths, std::size_t frame,
                               const std::optional<Mask>& mask = std::nullopt);

/// Dense object flow for frames 0..frame_count-1 from per-frame paths (each
/// exactly frame_count long). No paths gives zero flow everywhere.
std::vector<FlowField> densify_paths(const std::vector<std::vector<Eigen::Vector2d>>& paths, int frame_count,
                                     int width, int height, const std::optional<Mask>& mask = std::nullopt,
                                     double sigma = kDefaultDensifySigma);

}  // namespace motionfield
