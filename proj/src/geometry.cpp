// SPDX-License-Identifier: Apache-2.0

#include "motionfield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <Eigen/LU>

#include "motionfield/simd/kernels.hpp"
#include "pixel_kernels.hpp"

namespace motionfield {

Intrinsics::Intrinsics(double fx, double fy, double cx, double cy, int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
    require(width > 0 && height > 0, ErrorKind::invalid_argument, "intrinsics: image size must be positive");
    require(std::isfinite(fx) && fx > 0.0 && std::isfinite(fy) && fy > 0.0, ErrorKind::invalid_argument,
            "intrinsics: focal lengths must be positive");
    require(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height, ErrorKind::invalid_argument,
            "intrinsics: principal point outside the image");
}

Intrinsics Intrinsics::default_for(int width, int height) {
    const double f = static_cast<double>(std::max(width, height));
    return {f, f, width / 2.0, height / 2.0, width, height};
}

double orthonormality_error(const Eigen::Matrix3d& rotation) {
    const double gram = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    const double det = std::abs(rotation.determinant() - 1.0);
    if (!std::isfinite(gram) || !std::isfinite(det)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::max(gram, det);
}

Extrinsics::Extrinsics(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
    require(orthonormality_error(rotation) <= 1e-9, ErrorKind::non_orthonormal,
            "extrinsics: rotation is not orthonormal with det +1");
    require(translation.allFinite(), ErrorKind::invalid_argument, "extrinsics: non-finite translation");
}

Extrinsics Extrinsics::from_approximate(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation,
                                        double tolerance) {
    const double err = orthonormality_error(rotation);
    require(err <= tolerance, ErrorKind::non_orthonormal,
            "extrinsics: rotation off orthonormal by " + std::to_string(err));
    if (err == 0.0) {
        return {rotation, translation};
    }
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {svd.matrixU() * svd.matrixV().transpose(), translation};
}

Extrinsics Extrinsics::from_camera_pose(const Eigen::Matrix3d& camera_to_world, const Eigen::Vector3d& center) {
    const Eigen::Matrix3d world_to_camera = camera_to_world.transpose();
    return {world_to_camera, -(world_to_camera * center)};
}

Extrinsics Extrinsics::inverse() const {
    const Eigen::Matrix3d rt = rotation_.transpose();
    return {rt, -(rt * translation_)};
}

Extrinsics Extrinsics::operator*(const Extrinsics& other) const {
    return from_approximate(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_, 1e-9);
}

double Extrinsics::max_abs_difference(const Extrinsics& other) const {
    return std::max((rotation_ - other.rotation_).cwiseAbs().maxCoeff(),
                    (translation_ - other.translation_).cwiseAbs().maxCoeff());
}

double DepthMap::max_valid() const {
    double best = 0.0;
    for (const double d : values_.values()) {
        if (is_valid_depth(d)) {
            best = std::max(best, d);
        }
    }
    return best;
}

PixelGrid PixelGrid::pixel_centers(int width, int height) {
    PixelGrid grid(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            grid.u(x, y) = x;
            grid.v(x, y) = y;
        }
    }
    grid.valid.fill(1);
    return grid;
}

PointGrid unproject(const PixelGrid& pixels, const DepthMap& depth, const Intrinsics& intrinsics) {
    require(depth.width() == intrinsics.width() && depth.height() == intrinsics.height(),
            ErrorKind::dimension_mismatch, "unproject: depth map does not match intrinsics");
    require(pixels.u.same_shape(depth.values()) && pixels.v.same_shape(depth.values()) &&
                pixels.valid.same_shape(depth.values()),
            ErrorKind::dimension_mismatch, "unproject: pixel grid does not match depth map");
    PointGrid out(depth.width(), depth.height());
    simd::kernels().unproject(out.x.size(), pixels.u.data(), pixels.v.data(), depth.values().data(),
                              pixels.valid.data(), detail::pinhole(intrinsics), out.x.data(), out.y.data(),
                              out.z.data(), out.valid.data());
    return out;
}

PointGrid unproject(const DepthMap& depth, const Intrinsics& intrinsics) {
    return unproject(PixelGrid::pixel_centers(depth.width(), depth.height()), depth, intrinsics);
}

PointGrid transform(const PointGrid& points, const Extrinsics& extrinsics) {
    PointGrid out(points.width(), points.height());
    simd::kernels().transform(out.x.size(), points.x.data(), points.y.data(), points.z.data(), points.valid.data(),
                              detail::rigid(extrinsics), out.x.data(), out.y.data(), out.z.data(),
                              out.valid.data());
    return out;
}

PixelGrid project(const PointGrid& points, const Intrinsics& intrinsics) {
    PixelGrid out(points.width(), points.height());
    simd::kernels().project(out.u.size(), points.x.data(), points.y.data(), points.z.data(), points.valid.data(),
                            detail::pinhole(intrinsics), kMinCameraDepth, out.u.data(), out.v.data(),
                            out.valid.data());
    return out;
}

Eigen::Vector3d unproject_pixel(double u, double v, double depth, const Intrinsics& k) {
    return {(u - k.cx()) * depth / k.fx(), (v - k.cy()) * depth / k.fy(), depth};
}

bool project_point(const Eigen::Vector3d& p, const Intrinsics& k, double& u, double& v) {
    if (!(p.z() > kMinCameraDepth)) {
        return false;
    }
    u = k.fx() * p.x() / p.z() + k.cx();
    v = k.fy() * p.y() / p.z() + k.cy();
    return true;
}

}  // namespace motionfield
