// SPDX-License-Identifier: Apache-2.0

// Scalar reference kernels. The AVX2 variants evaluate the same expressions
// in the same order, so the geometric kernels agree bit-for-bit.

#include <algorithm>
#include <cmath>
#include <limits>

#include "motionfield/simd/kernels.hpp"

namespace motionfield::simd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool valid_depth(double d) { return d > 0.0 && d < kInf; }

void unproject_scalar(std::size_t n, const double* u, const double* v, const double* depth,
                      const std::uint8_t* pixel_valid, const Pinhole& cam, double* x, double* y, double* z,
                      std::uint8_t* valid) {
    for (std::size_t i = 0; i < n; ++i) {
        const double d = depth[i];
        const bool ok = pixel_valid[i] != 0 && valid_depth(d);
        if (ok) {
            x[i] = (u[i] - cam.cx) * d / cam.fx;
            y[i] = (v[i] - cam.cy) * d / cam.fy;
            z[i] = d;
        } else {
            x[i] = y[i] = z[i] = 0.0;
        }
        valid[i] = ok ? 1 : 0;
    }
}

void transform_scalar(std::size_t n, const double* x, const double* y, const double* z, const std::uint8_t* valid_in,
                      const Rigid& p, double* ox, double* oy, double* oz, std::uint8_t* valid) {
    for (std::size_t i = 0; i < n; ++i) {
        if (valid_in[i] != 0) {
            const double px = x[i], py = y[i], pz = z[i];
            ox[i] = p.r[0] * px + p.r[1] * py + p.r[2] * pz + p.t[0];
            oy[i] = p.r[3] * px + p.r[4] * py + p.r[5] * pz + p.t[1];
            oz[i] = p.r[6] * px + p.r[7] * py + p.r[8] * pz + p.t[2];
            valid[i] = 1;
        } else {
            ox[i] = oy[i] = oz[i] = 0.0;
            valid[i] = 0;
        }
    }
}

void project_scalar(std::size_t n, const double* x, const double* y, const double* z, const std::uint8_t* valid_in,
                    const Pinhole& cam, double min_depth, double* u, double* v, std::uint8_t* valid) {
    for (std::size_t i = 0; i < n; ++i) {
        const bool ok = valid_in[i] != 0 && z[i] > min_depth;
        if (ok) {
            u[i] = cam.fx * x[i] / z[i] + cam.cx;
            v[i] = cam.fy * y[i] / z[i] + cam.cy;
        } else {
            u[i] = v[i] = 0.0;
        }
        valid[i] = ok ? 1 : 0;
    }
}

void compose_row_scalar(const ComposeRowArgs& a) {
    const Pinhole& c = a.camera;
    const Rigid& p = a.pose;
    for (std::size_t i = 0; i < a.n; ++i) {
        const double u = static_cast<double>(i);
        const double d = a.depth[i];
        bool ok = a.object_valid[i] != 0 && valid_depth(d);
        double du = 0.0, dv = 0.0, zc = 0.0;
        bool outside = false;
        if (ok) {
            // Moved point keeps the source pixel's depth.
            const double qu = u + a.object_du[i];
            const double qv = a.v + a.object_dv[i];
            const double X = (qu - c.cx) * d / c.fx;
            const double Y = (qv - c.cy) * d / c.fy;
            const double Z = d;
            const double xc = p.r[0] * X + p.r[1] * Y + p.r[2] * Z + p.t[0];
            const double yc = p.r[3] * X + p.r[4] * Y + p.r[5] * Z + p.t[1];
            zc = p.r[6] * X + p.r[7] * Y + p.r[8] * Z + p.t[2];
            ok = zc > a.min_depth;
            if (ok) {
                const double u1 = c.fx * xc / zc + c.cx;
                const double v1 = c.fy * yc / zc + c.cy;
                du = u1 - u;
                dv = v1 - a.v;
                outside = !(u1 >= 0.0 && u1 < a.width && v1 >= 0.0 && v1 < a.height);
            } else {
                zc = 0.0;
            }
        }
        a.du[i] = du;
        a.dv[i] = dv;
        a.z[i] = zc;
        a.valid[i] = ok ? 1 : 0;
        a.out_of_frame[i] = outside ? 1 : 0;
    }
}

void remove_camera_row_scalar(const RemoveCameraRowArgs& a) {
    const Pinhole& c = a.camera;
    const Rigid& p = a.inverse_pose;
    const double max_u = static_cast<double>(a.depth_width - 1);
    const double max_v = static_cast<double>(a.depth_height - 1);
    const double last_x0 = static_cast<double>(a.depth_width - 2);
    const double last_y0 = static_cast<double>(a.depth_height - 2);
    for (std::size_t i = 0; i < a.n; ++i) {
        const double u = static_cast<double>(i);
        double du = 0.0, dv = 0.0;
        bool ok = a.flow_valid[i] != 0;
        if (ok) {
            const double u1 = u + a.flow_du[i];
            const double v1 = a.v + a.flow_dv[i];
            ok = u1 >= 0.0 && u1 <= max_u && v1 >= 0.0 && v1 <= max_v;
            if (ok) {
                const double x0 = std::min(std::floor(u1), last_x0);
                const double y0 = std::min(std::floor(v1), last_y0);
                const double fa = u1 - x0;
                const double fb = v1 - y0;
                const std::size_t idx = static_cast<std::size_t>(y0) * static_cast<std::size_t>(a.depth_width) +
                                        static_cast<std::size_t>(x0);
                const double i00 = a.inverse_depth[idx];
                const double i10 = a.inverse_depth[idx + 1];
                const double i01 = a.inverse_depth[idx + a.depth_width];
                const double i11 = a.inverse_depth[idx + a.depth_width + 1];
                ok = i00 > 0.0 && i10 > 0.0 && i01 > 0.0 && i11 > 0.0;
                if (ok) {
                    const double top = i00 + fa * (i10 - i00);
                    const double bottom = i01 + fa * (i11 - i01);
                    const double inv = top + fb * (bottom - top);
                    const double z = 1.0 / inv;
                    const double X = (u1 - c.cx) * z / c.fx;
                    const double Y = (v1 - c.cy) * z / c.fy;
                    const double Z = z;
                    const double xw = p.r[0] * X + p.r[1] * Y + p.r[2] * Z + p.t[0];
                    const double yw = p.r[3] * X + p.r[4] * Y + p.r[5] * Z + p.t[1];
                    const double zw = p.r[6] * X + p.r[7] * Y + p.r[8] * Z + p.t[2];
                    ok = zw > a.min_depth;
                    if (ok) {
                        du = (c.fx * xw / zw + c.cx) - u;
                        dv = (c.fy * yw / zw + c.cy) - a.v;
                    }
                }
            }
        }
        a.du[i] = du;
        a.dv[i] = dv;
        a.valid[i] = ok ? 1 : 0;
    }
}

void densify_row_scalar(const DensifyRowArgs& a) {
    for (std::size_t i = 0; i < a.n; ++i) {
        if (a.mask != nullptr && a.mask[i] == 0) {
            a.du[i] = 0.0;
            a.dv[i] = 0.0;
            continue;
        }
        const double u = static_cast<double>(i);
        double weight_sum = 0.0, sum_u = 0.0, sum_v = 0.0;
        for (std::size_t k = 0; k < a.anchor_count; ++k) {
            const double dx = u - a.anchor_u[k];
            const double dy = a.v - a.anchor_v[k];
            const double d2 = dx * dx + dy * dy;
            if (d2 <= a.cutoff2) {
                const double w = std::exp(d2 * a.neg_half_inv_sigma2);
                weight_sum += w;
                sum_u += w * a.anchor_du[k];
                sum_v += w * a.anchor_dv[k];
            }
        }
        const double denom = std::max(1.0, weight_sum);
        a.du[i] = sum_u / denom;
        a.dv[i] = sum_v / denom;
    }
}

void epe_accumulate_scalar(std::size_t n, const double* a_du, const double* a_dv, const std::uint8_t* a_valid,
                           const double* b_du, const double* b_dv, const std::uint8_t* b_valid, double* sum,
                           std::size_t* count) {
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a_valid[i] != 0 && b_valid[i] != 0) {
            const double ex = a_du[i] - b_du[i];
            const double ey = a_dv[i] - b_dv[i];
            s += std::sqrt(ex * ex + ey * ey);
            ++c;
        }
    }
    *sum += s;
    *count += c;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar",
        unproject_scalar,
        transform_scalar,
        project_scalar,
        compose_row_scalar,
        remove_camera_row_scalar,
        densify_row_scalar,
        epe_accumulate_scalar,
    };
    return table;
}

}  // namespace motionfield::simd
