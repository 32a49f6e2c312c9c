// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <utility>

#include <Eigen/Core>

#include "motionfield/grid.hpp"

namespace motionfield {

/// Points at or behind this camera-space depth are treated as not visible.
inline constexpr double kMinCameraDepth = 1e-6;

/// Pinhole intrinsics. The constructor enforces fx, fy > 0 and a principal
/// point inside the image.
class Intrinsics {
public:
    Intrinsics(double fx, double fy, double cx, double cy, int width, int height);

    /// fx = fy = max(width, height), principal point at the image center.
    static Intrinsics default_for(int width, int height);

    double fx() const noexcept { return fx_; }
    double fy() const noexcept { return fy_; }
    double cx() const noexcept { return cx_; }
    double cy() const noexcept { return cy_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    bool operator==(const Intrinsics&) const = default;

private:
    double fx_, fy_, cx_, cy_;
    int width_, height_;
};

/// World-to-camera rigid transform, x_cam = R * x_world + t (OpenCV axes:
/// x right, y down, z forward). Frame 0's camera frame is the world frame.
class Extrinsics {
public:
    Extrinsics() = default;

    /// Rejects R unless R^T R = I and det R = 1 to within 1e-9.
    Extrinsics(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

    /// Accepts R within `tolerance` of orthonormal and projects it onto SO(3).
    static Extrinsics from_approximate(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                                       double tolerance);

    /// Camera with orientation `camera_to_world` located at `center` (world coordinates).
    static Extrinsics from_camera_pose(const Eigen::Matrix3d& camera_to_world, const Eigen::Vector3d& center);

    static Extrinsics identity() { return {}; }

    const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
    const Eigen::Vector3d& translation() const noexcept { return translation_; }

    /// Camera center in world coordinates, c = -R^T t.
    Eigen::Vector3d camera_center() const { return -(rotation_.transpose() * translation_); }

    Extrinsics inverse() const;

    /// (this * other)(p) = this(other(p)).
    Extrinsics operator*(const Extrinsics& other) const;

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }

    /// Largest absolute entry difference over R and t.
    double max_abs_difference(const Extrinsics& other) const;

private:
    Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation_ = Eigen::Vector3d::Zero();
};

/// Max deviation of R^T R from I and of det R from 1.
double orthonormality_error(const Eigen::Matrix3d& rotation);

/// Metric depth per pixel. A value is valid iff it is finite and > 0; anything
/// else (0 is the usual sentinel) marks the pixel invalid.
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(int width, int height, double fill = 0.0) : values_(width, height, fill) {}
    explicit DepthMap(Grid<double> values) : values_(std::move(values)) {}

    int width() const noexcept { return values_.width(); }
    int height() const noexcept { return values_.height(); }

    double& operator()(int x, int y) { return values_(x, y); }
    double operator()(int x, int y) const { return values_(x, y); }

    bool is_valid(int x, int y) const { return is_valid_depth(values_(x, y)); }
    static bool is_valid_depth(double d) noexcept { return d > 0.0 && d < std::numeric_limits<double>::infinity(); }

    const Grid<double>& values() const noexcept { return values_; }
    Grid<double>& values() noexcept { return values_; }

    /// Largest valid depth; 0 when no pixel is valid.
    double max_valid() const;

private:
    Grid<double> values_;
};

/// Per-pixel displacement in pixels, frame 0 -> frame k.
struct FlowField {
    Grid<double> du;
    Grid<double> dv;
    Mask valid;

    FlowField() = default;
    /// Zero flow, every pixel valid.
    FlowField(int width, int height) : du(width, height, 0.0), dv(width, height, 0.0), valid(width, height, 1) {}

    int width() const noexcept { return du.width(); }
    int height() const noexcept { return du.height(); }
};

struct PointGrid {
    Grid<double> x;
    Grid<double> y;
    Grid<double> z;
    Mask valid;

    PointGrid() = default;
    PointGrid(int width, int height) : x(width, height), y(width, height), z(width, height), valid(width, height, 0) {}

    int width() const noexcept { return x.width(); }
    int height() const noexcept { return x.height(); }
};

/// Per-pixel image coordinates.
struct PixelGrid {
    Grid<double> u;
    Grid<double> v;
    Mask valid;

    PixelGrid() = default;
    PixelGrid(int width, int height) : u(width, height), v(width, height), valid(width, height, 0) {}

    /// Pixel centers (x, y) of a width x height image, all valid.
    static PixelGrid pixel_centers(int width, int height);

    int width() const noexcept { return u.width(); }
    int height() const noexcept { return u.height(); }
};

/// Lift pixels with the given depths: X = (u - cx) d / fx, Y = (v - cy) d / fy, Z = d.
/// Invalid depth or an invalid pixel yields an invalid point.
PointGrid unproject(const PixelGrid& pixels, const DepthMap& depth, const Intrinsics& intrinsics);

/// Lift every pixel center of the depth map.
PointGrid unproject(const DepthMap& depth, const Intrinsics& intrinsics);

/// p' = R p + t for every valid point.
PointGrid transform(const PointGrid& points, const Extrinsics& extrinsics);

/// u = fx X / Z + cx, v = fy Y / Z + cy. Points with Z <= kMinCameraDepth come back invalid.
PixelGrid project(const PointGrid& points, const Intrinsics& intrinsics);

Eigen::Vector3d unproject_pixel(double u, double v, double depth, const Intrinsics& intrinsics);

/// Returns false for points at or behind kMinCameraDepth.
bool project_point(const Eigen::Vector3d& p, const Intrinsics& intrinsics, double& u, double& v);

}  // namespace motionfield
