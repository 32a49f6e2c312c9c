// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "motionfield/geometry.hpp"

namespace motionfield {

/// Temporal progress profile of a camera move.
enum class MotionType { uniform, decrement, increment };

std::optional<MotionType> parse_motion_type(std::string_view text);
std::string_view to_string(MotionType type);

/// Payload of Set_Camera_Motion. Translations are fractions of the scene's
/// maximum depth, strictly inside (-1, 1); rotations are degrees in [0, 360)
/// about the camera's own x (right), y (down) and z (forward) axes.
struct CameraMotionSpec {
    double x_translation = 0.0;
    double y_translation = 0.0;
    double z_translation = 0.0;
    double x_rotation = 0.0;
    double y_rotation = 0.0;
    double z_rotation = 0.0;
    MotionType motion_type = MotionType::uniform;

    /// Throws ErrorKind::range_violation naming the offending field.
    void validate() const;

    bool operator==(const CameraMotionSpec&) const = default;
};

/// Progress fractions s_0 = 0 ... s_{K-1} = 1, non-decreasing.
struct PacingCurve {
    std::vector<double> values;
};

/// uniform: s = k/(K-1); increment: s^2 (ease-in); decrement: 1 - (1 - s)^2 (ease-out).
PacingCurve pacing(MotionType type, int frame_count);

/// Angle in [0, 360) mapped to (-180, 180], so 350 means a 10 degree turn the other way.
double signed_degrees(double degrees);

/// Camera-to-world orientation after `progress` of the move: Rz * Ry * Rx with
/// each angle scaled by progress.
Eigen::Matrix3d camera_orientation(const CameraMotionSpec& spec, double progress);

/// Per-frame world-to-camera extrinsics for one move. Frame 0 is the identity;
/// frame k's camera center is s_k * (x, y, z) * max_depth in frame-0 coordinates.
std::vector<Extrinsics> generate_extrinsics(const CameraMotionSpec& spec, double max_depth, int frame_count);

struct CameraSegment {
    CameraMotionSpec spec;
    int frame_count = 0;
};

/// Chains moves, each relative to the previous segment's final pose. Segment
/// boundaries share a frame, so the result has sum(K_i) - (n - 1) poses.
std::vector<Extrinsics> concat_segments(std::span<const CameraSegment> segments, double max_depth);

}  // namespace motionfield
