// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-pixel inner loops behind geometry, flow_compose, flow_decompose and
// densify. Every kernel has a scalar reference and (on x86-64) an AVX2
// variant; the active table is picked once at runtime.
//
// This header is included by translation units compiled with -mavx2, so it
// must stay free of inline functions and templates: only POD types and
// function-pointer tables.

#include <cstddef>
#include <cstdint>

namespace motionfield::simd {

enum class Backend { scalar, avx2 };

struct Pinhole {
    double fx, fy, cx, cy;
};

/// Row-major 3x3 rotation and translation, p' = R p + t.
struct Rigid {
    double r[9];
    double t[3];
};

/// One image row of the unified-flow composition. Pixel i of the row sits
/// at (i, v). Outputs at invalid pixels are zero.
struct ComposeRowArgs {
    std::size_t n;
    double v;
    const double* depth;
    const double* object_du;
    const double* object_dv;
    const std::uint8_t* object_valid;
    Pinhole camera;
    Rigid pose;
    double min_depth;
    double width;
    double height;
    double* du;
    double* dv;
    double* z;
    std::uint8_t* valid;
    std::uint8_t* out_of_frame;
};

/// One image row of camera-flow removal. `inverse_depth` is the full frame-k
/// inverse depth raster (0 where invalid), sampled bilinearly at the flow target.
struct RemoveCameraRowArgs {
    std::size_t n;
    double v;
    const double* flow_du;
    const double* flow_dv;
    const std::uint8_t* flow_valid;
    const double* inverse_depth;
    int depth_width;
    int depth_height;
    Pinhole camera;
    Rigid inverse_pose;
    double min_depth;
    double* du;
    double* dv;
    std::uint8_t* valid;
};

/// One image row of Gaussian sparse-to-dense interpolation.
struct DensifyRowArgs {
    std::size_t n;
    double v;
    const double* anchor_u;
    const double* anchor_v;
    const double* anchor_du;
    const double* anchor_dv;
    std::size_t anchor_count;
    double neg_half_inv_sigma2;
    double cutoff2;
    const std::uint8_t* mask;  // may be null
    double* du;
    double* dv;
};

struct KernelTable {
    const char* name;

    void (*unproject)(std::size_t n, const double* u, const double* v, const double* depth,
                      const std::uint8_t* pixel_valid, const Pinhole& camera, double* x, double* y, double* z,
                      std::uint8_t* valid);

    void (*transform)(std::size_t n, const double* x, const double* y, const double* z,
                      const std::uint8_t* valid_in, const Rigid& pose, double* out_x, double* out_y, double* out_z,
                      std::uint8_t* valid);

    void (*project)(std::size_t n, const double* x, const double* y, const double* z, const std::uint8_t* valid_in,
                    const Pinhole& camera, double min_depth, double* u, double* v, std::uint8_t* valid);

    void (*compose_row)(const ComposeRowArgs& args);

    void (*remove_camera_row)(const RemoveCameraRowArgs& args);

    void (*densify_row)(const DensifyRowArgs& args);

    /// Adds the end-point errors of jointly valid pixels to *sum and their count to *count.
    void (*epe_accumulate)(std::size_t n, const double* a_du, const double* a_dv, const std::uint8_t* a_valid,
                           const double* b_du, const double* b_dv, const std::uint8_t* b_valid, double* sum,
                           std::size_t* count);
};

const KernelTable& scalar_kernels();
#if defined(MOTIONFIELD_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

bool backend_available(Backend backend);

/// Active backend: AVX2 when compiled in and supported by the CPU, unless the
/// MOTIONFIELD_SIMD environment variable says "scalar".
Backend active_backend();

/// Overrides the active backend process-wide; throws if it is unavailable.
void set_backend(Backend backend);

const KernelTable& kernels();
const KernelTable& kernels(Backend backend);

const char* backend_name(Backend backend);

}  // namespace motionfield::simd
