// SPDX-License-Identifier: Apache-2.0

// AVX2 variants of the per-pixel kernels, four doubles per lane group.
// Compiled with -mavx2 (no FMA) and only entered after a runtime CPU check.
// Arithmetic mirrors kernels_scalar.cpp operation for operation; the only
// kernels allowed to differ in the last bits are densify (polynomial exp)
// and the EPE reduction (lane-wise summation order).

#include <immintrin.h>

#include "motionfield/simd/kernels.hpp"

namespace motionfield::simd {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d load_mask(const std::uint8_t* m) {
    int bits;
    __builtin_memcpy(&bits, m, sizeof(bits));
    const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(bits));
    return _mm256_castsi256_pd(_mm256_cmpgt_epi64(wide, _mm256_setzero_si256()));
}

inline void store_mask(std::uint8_t* out, __m256d m) {
    const int bits = _mm256_movemask_pd(m);
    out[0] = static_cast<std::uint8_t>(bits & 1);
    out[1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out[2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out[3] = static_cast<std::uint8_t>((bits >> 3) & 1);
}

inline __m256d valid_depth(__m256d d) {
    const __m256d pos = _mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_GT_OQ);
    const __m256d fin = _mm256_cmp_pd(d, _mm256_set1_pd(__builtin_inf()), _CMP_LT_OQ);
    return _mm256_and_pd(pos, fin);
}

inline __m256d lane_index(std::size_t base) {
    const double b = static_cast<double>(base);
    return _mm256_set_pd(b + 3.0, b + 2.0, b + 1.0, b);
}

// r0 * x + r1 * y + r2 * z + t, left to right like the scalar code.
inline __m256d affine_row(const double* r, double t, __m256d x, __m256d y, __m256d z) {
    __m256d acc = _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(r[0]), x), _mm256_mul_pd(_mm256_set1_pd(r[1]), y));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(r[2]), z));
    return _mm256_add_pd(acc, _mm256_set1_pd(t));
}

// Tail handling: copy the remainder into zero-padded lane buffers, run the
// vector body once and copy back. Padding lanes carry valid = 0.
struct Tail4 {
    alignas(32) double d[8][kLanes];
    alignas(32) std::uint8_t m[4][kLanes];
};

// exp(x) for x in [-745, 0]: Cody-Waite reduction x = n ln2 + r with
// |r| <= ln2 / 2, degree-13 Taylor polynomial, then scaling by 2^n.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d ln2_hi = _mm256_set1_pd(0.693145751953125);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
    x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(n, ln2_hi));
    r = _mm256_sub_pd(r, _mm256_mul_pd(n, ln2_lo));

    static constexpr double kCoeff[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
        1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
        1.0 / 6.0,          0.5,               1.0,              1.0,
    };
    __m256d p = _mm256_set1_pd(kCoeff[0]);
    for (std::size_t k = 1; k < sizeof(kCoeff) / sizeof(kCoeff[0]); ++k) {
        p = _mm256_add_pd(_mm256_mul_pd(p, r), _mm256_set1_pd(kCoeff[k]));
    }

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_add_epi64(_mm256_cvtepi32_epi64(n32), _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

// ---------------------------------------------------------------------------

inline void unproject4(const double* u, const double* v, const double* depth, const std::uint8_t* pv,
                       const Pinhole& cam, double* x, double* y, double* z, std::uint8_t* valid) {
    const __m256d d = _mm256_loadu_pd(depth);
    const __m256d ok = _mm256_and_pd(load_mask(pv), valid_depth(d));
    const __m256d X = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(u), _mm256_set1_pd(cam.cx)), d),
                                    _mm256_set1_pd(cam.fx));
    const __m256d Y = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(v), _mm256_set1_pd(cam.cy)), d),
                                    _mm256_set1_pd(cam.fy));
    _mm256_storeu_pd(x, _mm256_and_pd(ok, X));
    _mm256_storeu_pd(y, _mm256_and_pd(ok, Y));
    _mm256_storeu_pd(z, _mm256_and_pd(ok, d));
    store_mask(valid, ok);
}

void unproject_avx2(std::size_t n, const double* u, const double* v, const double* depth, const std::uint8_t* pv,
                    const Pinhole& cam, double* x, double* y, double* z, std::uint8_t* valid) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        unproject4(u + i, v + i, depth + i, pv + i, cam, x + i, y + i, z + i, valid + i);
    }
    if (i < n) {
        Tail4 t{};
        const std::size_t rem = n - i;
        for (std::size_t k = 0; k < rem; ++k) {
            t.d[0][k] = u[i + k];
            t.d[1][k] = v[i + k];
            t.d[2][k] = depth[i + k];
            t.m[0][k] = pv[i + k];
        }
        unproject4(t.d[0], t.d[1], t.d[2], t.m[0], cam, t.d[3], t.d[4], t.d[5], t.m[1]);
        for (std::size_t k = 0; k < rem; ++k) {
            x[i + k] = t.d[3][k];
            y[i + k] = t.d[4][k];
            z[i + k] = t.d[5][k];
            valid[i + k] = t.m[1][k];
        }
    }
}

inline void transform4(const double* x, const double* y, const double* z, const std::uint8_t* vin, const Rigid& p,
                       double* ox, double* oy, double* oz, std::uint8_t* valid) {
    const __m256d ok = load_mask(vin);
    const __m256d px = _mm256_loadu_pd(x), py = _mm256_loadu_pd(y), pz = _mm256_loadu_pd(z);
    _mm256_storeu_pd(ox, _mm256_and_pd(ok, affine_row(p.r + 0, p.t[0], px, py, pz)));
    _mm256_storeu_pd(oy, _mm256_and_pd(ok, affine_row(p.r + 3, p.t[1], px, py, pz)));
    _mm256_storeu_pd(oz, _mm256_and_pd(ok, affine_row(p.r + 6, p.t[2], px, py, pz)));
    store_mask(valid, ok);
}

void transform_avx2(std::size_t n, const double* x, const double* y, const double* z, const std::uint8_t* vin,
                    const Rigid& p, double* ox, double* oy, double* oz, std::uint8_t* valid) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        transform4(x + i, y + i, z + i, vin + i, p, ox + i, oy + i, oz + i, valid + i);
    }
    if (i < n) {
        Tail4 t{};
        const std::size_t rem = n - i;
        for (std::size_t k = 0; k < rem; ++k) {
            t.d[0][k] = x[i + k];
            t.d[1][k] = y[i + k];
            t.d[2][k] = z[i + k];
            t.m[0][k] = vin[i + k];
        }
        transform4(t.d[0], t.d[1], t.d[2], t.m[0], p, t.d[3], t.d[4], t.d[5], t.m[1]);
        for (std::size_t k = 0; k < rem; ++k) {
            ox[i + k] = t.d[3][k];
            oy[i + k] = t.d[4][k];
            oz[i + k] = t.d[5][k];
            valid[i + k] = t.m[1][k];
        }
    }
}

inline void project4(const double* x, const double* y, const double* z, const std::uint8_t* vin, const Pinhole& cam,
                     double min_depth, double* u, double* v, std::uint8_t* valid) {
    const __m256d Z = _mm256_loadu_pd(z);
    const __m256d ok = _mm256_and_pd(load_mask(vin), _mm256_cmp_pd(Z, _mm256_set1_pd(min_depth), _CMP_GT_OQ));
    const __m256d U = _mm256_add_pd(
        _mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(cam.fx), _mm256_loadu_pd(x)), Z), _mm256_set1_pd(cam.cx));
    const __m256d V = _mm256_add_pd(
        _mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(cam.fy), _mm256_loadu_pd(y)), Z), _mm256_set1_pd(cam.cy));
    _mm256_storeu_pd(u, _mm256_and_pd(ok, U));
    _mm256_storeu_pd(v, _mm256_and_pd(ok, V));
    store_mask(valid, ok);
}

void project_avx2(std::size_t n, const double* x, const double* y, const double* z, const std::uint8_t* vin,
                  const Pinhole& cam, double min_depth, double* u, double* v, std::uint8_t* valid) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        project4(x + i, y + i, z + i, vin + i, cam, min_depth, u + i, v + i, valid + i);
    }
    if (i < n) {
        Tail4 t{};
        const std::size_t rem = n - i;
        for (std::size_t k = 0; k < rem; ++k) {
            t.d[0][k] = x[i + k];
            t.d[1][k] = y[i + k];
            t.d[2][k] = z[i + k];
            t.m[0][k] = vin[i + k];
        }
        project4(t.d[0], t.d[1], t.d[2], t.m[0], cam, min_depth, t.d[3], t.d[4], t.m[1]);
        for (std::size_t k = 0; k < rem; ++k) {
            u[i + k] = t.d[3][k];
            v[i + k] = t.d[4][k];
            valid[i + k] = t.m[1][k];
        }
    }
}

// ---------------------------------------------------------------------------

inline void compose4(const ComposeRowArgs& a, std::size_t base, const double* depth, const double* odu,
                     const double* odv, const std::uint8_t* ovalid, double* du, double* dv, double* z,
                     std::uint8_t* valid, std::uint8_t* oob) {
    const Pinhole& c = a.camera;
    const Rigid& p = a.pose;
    const __m256d u = lane_index(base);
    const __m256d v = _mm256_set1_pd(a.v);
    const __m256d d = _mm256_loadu_pd(depth);
    __m256d ok = _mm256_and_pd(load_mask(ovalid), valid_depth(d));

    const __m256d qu = _mm256_add_pd(u, _mm256_loadu_pd(odu));
    const __m256d qv = _mm256_add_pd(v, _mm256_loadu_pd(odv));
    const __m256d X = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(qu, _mm256_set1_pd(c.cx)), d), _mm256_set1_pd(c.fx));
    const __m256d Y = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(qv, _mm256_set1_pd(c.cy)), d), _mm256_set1_pd(c.fy));
    const __m256d xc = affine_row(p.r + 0, p.t[0], X, Y, d);
    const __m256d yc = affine_row(p.r + 3, p.t[1], X, Y, d);
    const __m256d zc = affine_row(p.r + 6, p.t[2], X, Y, d);
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(zc, _mm256_set1_pd(a.min_depth), _CMP_GT_OQ));

    const __m256d u1 =
        _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(c.fx), xc), zc), _mm256_set1_pd(c.cx));
    const __m256d v1 =
        _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(c.fy), yc), zc), _mm256_set1_pd(c.cy));
    const __m256d zero = _mm256_setzero_pd();
    __m256d inside = _mm256_and_pd(_mm256_cmp_pd(u1, zero, _CMP_GE_OQ),
                                   _mm256_cmp_pd(u1, _mm256_set1_pd(a.width), _CMP_LT_OQ));
    inside = _mm256_and_pd(inside, _mm256_cmp_pd(v1, zero, _CMP_GE_OQ));
    inside = _mm256_and_pd(inside, _mm256_cmp_pd(v1, _mm256_set1_pd(a.height), _CMP_LT_OQ));

    _mm256_storeu_pd(du, _mm256_and_pd(ok, _mm256_sub_pd(u1, u)));
    _mm256_storeu_pd(dv, _mm256_and_pd(ok, _mm256_sub_pd(v1, v)));
    _mm256_storeu_pd(z, _mm256_and_pd(ok, zc));
    store_mask(valid, ok);
    store_mask(oob, _mm256_andnot_pd(inside, ok));
}

void compose_row_avx2(const ComposeRowArgs& a) {
    std::size_t i = 0;
    for (; i + kLanes <= a.n; i += kLanes) {
        compose4(a, i, a.depth + i, a.object_du + i, a.object_dv + i, a.object_valid + i, a.du + i, a.dv + i,
                 a.z + i, a.valid + i, a.out_of_frame + i);
    }
    if (i < a.n) {
        Tail4 t{};
        const std::size_t rem = a.n - i;
        for (std::size_t k = 0; k < rem; ++k) {
            t.d[0][k] = a.depth[i + k];
            t.d[1][k] = a.object_du[i + k];
            t.d[2][k] = a.object_dv[i + k];
            t.m[0][k] = a.object_valid[i + k];
        }
        compose4(a, i, t.d[0], t.d[1], t.d[2], t.m[0], t.d[3], t.d[4], t.d[5], t.m[1], t.m[2]);
        for (std::size_t k = 0; k < rem; ++k) {
            a.du[i + k] = t.d[3][k];
            a.dv[i + k] = t.d[4][k];
            a.z[i + k] = t.d[5][k];
            a.valid[i + k] = t.m[1][k];
            a.out_of_frame[i + k] = t.m[2][k];
        }
    }
}

// ---------------------------------------------------------------------------

inline void remove_camera4(const RemoveCameraRowArgs& a, std::size_t base, const double* fdu, const double* fdv,
                           const std::uint8_t* fvalid, double* du, double* dv, std::uint8_t* valid) {
    const Pinhole& c = a.camera;
    const Rigid& p = a.inverse_pose;
    const __m256d zero = _mm256_setzero_pd();
    const __m256d u = lane_index(base);
    const __m256d v = _mm256_set1_pd(a.v);
    __m256d ok = load_mask(fvalid);

    const __m256d u1 = _mm256_add_pd(u, _mm256_loadu_pd(fdu));
    const __m256d v1 = _mm256_add_pd(v, _mm256_loadu_pd(fdv));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(u1, zero, _CMP_GE_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(u1, _mm256_set1_pd(static_cast<double>(a.depth_width - 1)), _CMP_LE_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(v1, zero, _CMP_GE_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(v1, _mm256_set1_pd(static_cast<double>(a.depth_height - 1)), _CMP_LE_OQ));

    // Park rejected lanes at (0, 0) so the gathers stay in bounds.
    const __m256d su = _mm256_and_pd(ok, u1);
    const __m256d sv = _mm256_and_pd(ok, v1);
    const __m256d x0 = _mm256_min_pd(_mm256_floor_pd(su), _mm256_set1_pd(static_cast<double>(a.depth_width - 2)));
    const __m256d y0 = _mm256_min_pd(_mm256_floor_pd(sv), _mm256_set1_pd(static_cast<double>(a.depth_height - 2)));
    const __m256d fa = _mm256_sub_pd(su, x0);
    const __m256d fb = _mm256_sub_pd(sv, y0);

    const __m128i xi = _mm256_cvttpd_epi32(x0);
    const __m128i yi = _mm256_cvttpd_epi32(y0);
    const __m128i w = _mm_set1_epi32(a.depth_width);
    const __m128i idx = _mm_add_epi32(_mm_mullo_epi32(yi, w), xi);
    const __m128i one = _mm_set1_epi32(1);

    const double* inv = a.inverse_depth;
    const __m256d i00 = _mm256_mask_i32gather_pd(zero, inv, idx, ok, 8);
    const __m256d i10 = _mm256_mask_i32gather_pd(zero, inv, _mm_add_epi32(idx, one), ok, 8);
    const __m256d i01 = _mm256_mask_i32gather_pd(zero, inv, _mm_add_epi32(idx, w), ok, 8);
    const __m256d i11 = _mm256_mask_i32gather_pd(zero, inv, _mm_add_epi32(_mm_add_epi32(idx, w), one), ok, 8);
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(i00, zero, _CMP_GT_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(i10, zero, _CMP_GT_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(i01, zero, _CMP_GT_OQ));
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(i11, zero, _CMP_GT_OQ));

    const __m256d top = _mm256_add_pd(i00, _mm256_mul_pd(fa, _mm256_sub_pd(i10, i00)));
    const __m256d bottom = _mm256_add_pd(i01, _mm256_mul_pd(fa, _mm256_sub_pd(i11, i01)));
    const __m256d inverse = _mm256_add_pd(top, _mm256_mul_pd(fb, _mm256_sub_pd(bottom, top)));
    const __m256d zd = _mm256_div_pd(_mm256_set1_pd(1.0), inverse);

    const __m256d X = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(u1, _mm256_set1_pd(c.cx)), zd), _mm256_set1_pd(c.fx));
    const __m256d Y = _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(v1, _mm256_set1_pd(c.cy)), zd), _mm256_set1_pd(c.fy));
    const __m256d xw = affine_row(p.r + 0, p.t[0], X, Y, zd);
    const __m256d yw = affine_row(p.r + 3, p.t[1], X, Y, zd);
    const __m256d zw = affine_row(p.r + 6, p.t[2], X, Y, zd);
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(zw, _mm256_set1_pd(a.min_depth), _CMP_GT_OQ));

    const __m256d uo =
        _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(c.fx), xw), zw), _mm256_set1_pd(c.cx));
    const __m256d vo =
        _mm256_add_pd(_mm256_div_pd(_mm256_mul_pd(_mm256_set1_pd(c.fy), yw), zw), _mm256_set1_pd(c.cy));
    _mm256_storeu_pd(du, _mm256_and_pd(ok, _mm256_sub_pd(uo, u)));
    _mm256_storeu_pd(dv, _mm256_and_pd(ok, _mm256_sub_pd(vo, v)));
    store_mask(valid, ok);
}

void remove_camera_row_avx2(const RemoveCameraRowArgs& a) {
    std::size_t i = 0;
    for (; i + kLanes <= a.n; i += kLanes) {
        remove_camera4(a, i, a.flow_du + i, a.flow_dv + i, a.flow_valid + i, a.du + i, a.dv + i, a.valid + i);
    }
    if (i < a.n) {
        Tail4 t{};
        const std::size_t rem = a.n - i;
        for (std::size_t k = 0; k < rem; ++k) {
            t.d[0][k] = a.flow_du[i + k];
            t.d[1][k] = a.flow_dv[i + k];
            t.m[0][k] = a.flow_valid[i + k];
        }
        remove_camera4(a, i, t.d[0], t.d[1], t.m[0], t.d[2], t.d[3], t.m[1]);
        for (std::size_t k = 0; k < rem; ++k) {
            a.du[i + k] = t.d[2][k];
            a.dv[i + k] = t.d[3][k];
            a.valid[i + k] = t.m[1][k];
        }
    }
}

// ---------------------------------------------------------------------------

inline void densify4(const DensifyRowArgs& a, std::size_t base, const std::uint8_t* mask, double* du, double* dv) {
    const __m256d u = lane_index(base);
    const __m256d v = _mm256_set1_pd(a.v);
    const __m256d scale = _mm256_set1_pd(a.neg_half_inv_sigma2);
    const __m256d cutoff = _mm256_set1_pd(a.cutoff2);
    __m256d weight_sum = _mm256_setzero_pd();
    __m256d sum_u = _mm256_setzero_pd();
    __m256d sum_v = _mm256_setzero_pd();
    for (std::size_t k = 0; k < a.anchor_count; ++k) {
        const __m256d dx = _mm256_sub_pd(u, _mm256_set1_pd(a.anchor_u[k]));
        const __m256d dy = _mm256_sub_pd(v, _mm256_set1_pd(a.anchor_v[k]));
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        const __m256d inside = _mm256_cmp_pd(d2, cutoff, _CMP_LE_OQ);
        if (_mm256_movemask_pd(inside) == 0) {
            continue;
        }
        const __m256d w = _mm256_and_pd(inside, exp_pd(_mm256_mul_pd(d2, scale)));
        weight_sum = _mm256_add_pd(weight_sum, w);
        sum_u = _mm256_add_pd(sum_u, _mm256_mul_pd(w, _mm256_set1_pd(a.anchor_du[k])));
        sum_v = _mm256_add_pd(sum_v, _mm256_mul_pd(w, _mm256_set1_pd(a.anchor_dv[k])));
    }
    const __m256d denom = _mm256_max_pd(_mm256_set1_pd(1.0), weight_sum);
    __m256d keep = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    if (mask != nullptr) {
        keep = load_mask(mask);
    }
    _mm256_storeu_pd(du, _mm256_and_pd(keep, _mm256_div_pd(sum_u, denom)));
    _mm256_storeu_pd(dv, _mm256_and_pd(keep, _mm256_div_pd(sum_v, denom)));
}

void densify_row_avx2(const DensifyRowArgs& a) {
    std::size_t i = 0;
    for (; i + kLanes <= a.n; i += kLanes) {
        densify4(a, i, a.mask != nullptr ? a.mask + i : nullptr, a.du + i, a.dv + i);
    }
    if (i < a.n) {
        Tail4 t{};
        const std::size_t rem = a.n - i;
        if (a.mask != nullptr) {
            for (std::size_t k = 0; k < rem; ++k) {
                t.m[0][k] = a.mask[i + k];
            }
        }
        densify4(a, i, a.mask != nullptr ? t.m[0] : nullptr, t.d[0], t.d[1]);
        for (std::size_t k = 0; k < rem; ++k) {
            a.du[i + k] = t.d[0][k];
            a.dv[i + k] = t.d[1][k];
        }
    }
}

// ---------------------------------------------------------------------------

void epe_accumulate_avx2(std::size_t n, const double* a_du, const double* a_dv, const std::uint8_t* a_valid,
                         const double* b_du, const double* b_dv, const std::uint8_t* b_valid, double* sum,
                         std::size_t* count) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d ok = _mm256_and_pd(load_mask(a_valid + i), load_mask(b_valid + i));
        const __m256d ex = _mm256_sub_pd(_mm256_loadu_pd(a_du + i), _mm256_loadu_pd(b_du + i));
        const __m256d ey = _mm256_sub_pd(_mm256_loadu_pd(a_dv + i), _mm256_loadu_pd(b_dv + i));
        const __m256d e = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
        acc = _mm256_add_pd(acc, _mm256_and_pd(ok, e));
        c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(ok))));
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) {
        if (a_valid[i] != 0 && b_valid[i] != 0) {
            const double ex = a_du[i] - b_du[i];
            const double ey = a_dv[i] - b_dv[i];
            s += __builtin_sqrt(ex * ex + ey * ey);
            ++c;
        }
    }
    *sum += s;
    *count += c;
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{
        "avx2",
        unproject_avx2,
        transform_avx2,
        project_avx2,
        compose_row_avx2,
        remove_camera_row_avx2,
        densify_row_avx2,
        epe_accumulate_avx2,
    };
    return table;
}

}  // namespace motionfield::simd
