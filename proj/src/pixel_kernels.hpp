// SPDX-License-Identifier: Apache-2.0
#pragma once

// Conversions from the domain types to the kernel ABI. Private to src/.

#include "motionfield/geometry.hpp"
#include "motionfield/simd/kernels.hpp"

namespace motionfield::detail {

inline simd::Pinhole pinhole(const Intrinsics& k) { return {k.fx(), k.fy(), k.cx(), k.cy()}; }

inline simd::Rigid rigid(const Extrinsics& e) {
    simd::Rigid out{};
    const Eigen::Matrix3d& r = e.rotation();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.r[3 * i + j] = r(i, j);
        }
        out.t[i] = e.translation()(i);
    }
    return out;
}

}  // namespace motionfield::detail
