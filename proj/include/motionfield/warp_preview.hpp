// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "motionfield/flow_compose.hpp"
#include "motionfield/image.hpp"

namespace motionfield {

struct Frame {
    RgbImage rgb;
    Mask hole_mask;  // 1 where no source pixel landed
};

struct WarpOptions {
    /// Copy the nearest landed color into holes (hole_mask still reports them).
    bool fill_holes = false;
};

/// Nearest-neighbor forward splat: source pixel p lands on round(p + F(p)).
/// When several pixels land on one target the smaller depth_proxy wins; equal
/// depths keep the first pixel in row-major order. An empty depth_proxy
/// treats every pixel as equally near. Invalid flow pixels are not splatted.
Frame forward_warp(const RgbImage& source, const FlowField& flow, const Grid<double>& depth_proxy,
                   const WarpOptions& options = {});

/// One warped frame per unified flow map, z-ordered by the composed camera depth.
std::vector<Frame> render_sequence(const RgbImage& source, const UnifiedFlow& unified,
                                   const WarpOptions& options = {});

/// Fraction of hole pixels in a frame.
double hole_fraction(const Frame& frame);

}  // namespace motionfield
