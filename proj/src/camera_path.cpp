// SPDX-License-Identifier: Apache-2.0

#include "motionfield/camera_path.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

namespace motionfield {

std::optional<MotionType> parse_motion_type(std::string_view text) {
    if (text == "uniform") return MotionType::uniform;
    if (text == "decrement") return MotionType::decrement;
    if (text == "increment") return MotionType::increment;
    return std::nullopt;
}

std::string_view to_string(MotionType type) {
    switch (type) {
        case MotionType::uniform: return "uniform";
        case MotionType::decrement: return "decrement";
        case MotionType::increment: return "increment";
    }
    return "uniform";
}

namespace {

void check_translation(double value, const char* name) {
    require(std::isfinite(value) && value > -1.0 && value < 1.0, ErrorKind::range_violation,
            std::string(name) + " must lie in (-1, 1), got " + std::to_string(value));
}

void check_rotation(double value, const char* name) {
    require(std::isfinite(value) && value >= 0.0 && value < 360.0, ErrorKind::range_violation,
            std::string(name) + " must lie in [0, 360), got " + std::to_string(value));
}

}  // namespace

void CameraMotionSpec::validate() const {
    check_translation(x_translation, "x_translation");
    check_translation(y_translation, "y_translation");
    check_translation(z_translation, "z_translation");
    check_rotation(x_rotation, "x_rotation");
    check_rotation(y_rotation, "y_rotation");
    check_rotation(z_rotation, "z_rotation");
    require(motion_type == MotionType::uniform || motion_type == MotionType::decrement ||
                motion_type == MotionType::increment,
            ErrorKind::invalid_literal, "unknown motion_type");
}

PacingCurve pacing(MotionType type, int frame_count) {
    require(frame_count >= 2, ErrorKind::invalid_argument, "pacing needs at least 2 frames");
    PacingCurve curve;
    curve.values.resize(static_cast<std::size_t>(frame_count));
    const double last = static_cast<double>(frame_count - 1);
    for (int k = 0; k < frame_count; ++k) {
        const double s = k / last;
        double value = s;
        if (type == MotionType::increment) {
            value = s * s;
        } else if (type == MotionType::decrement) {
            value = 1.0 - (1.0 - s) * (1.0 - s);
        }
        curve.values[static_cast<std::size_t>(k)] = value;
    }
    return curve;
}

double signed_degrees(double degrees) { return degrees > 180.0 ? degrees - 360.0 : degrees; }

Eigen::Matrix3d camera_orientation(const CameraMotionSpec& spec, double progress) {
    constexpr double kDegToRad = std::numbers::pi / 180.0;
    const double ax = progress * signed_degrees(spec.x_rotation) * kDegToRad;
    const double ay = progress * signed_degrees(spec.y_rotation) * kDegToRad;
    const double az = progress * signed_degrees(spec.z_rotation) * kDegToRad;
    const Eigen::Matrix3d rx = Eigen::AngleAxisd(ax, Eigen::Vector3d::UnitX()).toRotationMatrix();
    const Eigen::Matrix3d ry = Eigen::AngleAxisd(ay, Eigen::Vector3d::UnitY()).toRotationMatrix();
    const Eigen::Matrix3d rz = Eigen::AngleAxisd(az, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    return rz * ry * rx;
}

std::vector<Extrinsics> generate_extrinsics(const CameraMotionSpec& spec, double max_depth, int frame_count) {
    spec.validate();
    require(std::isfinite(max_depth) && max_depth > 0.0, ErrorKind::invalid_argument,
            "max depth must be positive");
    require(frame_count >= 1, ErrorKind::invalid_argument, "frame count must be at least 1");

    std::vector<Extrinsics> poses;
    poses.reserve(static_cast<std::size_t>(frame_count));
    poses.push_back(Extrinsics::identity());
    if (frame_count == 1) {
        return poses;
    }
    const PacingCurve curve = pacing(spec.motion_type, frame_count);
    const Eigen::Vector3d direction(spec.x_translation, spec.y_translation, spec.z_translation);
    for (int k = 1; k < frame_count; ++k) {
        const double s = curve.values[static_cast<std::size_t>(k)];
        const Eigen::Vector3d center = s * direction * max_depth;
        poses.push_back(Extrinsics::from_camera_pose(camera_orientation(spec, s), center));
    }
    return poses;
}

std::vector<Extrinsics> concat_segments(std::span<const CameraSegment> segments, double max_depth) {
    require(!segments.empty(), ErrorKind::invalid_argument, "camera path needs at least one segment");
    std::vector<Extrinsics> poses;
    Extrinsics start = Extrinsics::identity();
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::vector<Extrinsics> local =
            generate_extrinsics(segments[i].spec, max_depth, segments[i].frame_count);
        // A later segment's frame 0 is the previous segment's last frame.
        for (std::size_t k = (i == 0 ? 0 : 1); k < local.size(); ++k) {
            poses.push_back(local[k] * start);
        }
        start = poses.back();
    }
    return poses;
}

}  // namespace motionfield
