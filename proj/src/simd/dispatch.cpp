// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "motionfield/error.hpp"
#include "motionfield/simd/kernels.hpp"

namespace motionfield::simd {
namespace {

bool cpu_has_avx2() {
#if defined(MOTIONFIELD_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Backend detect() {
    if (const char* env = std::getenv("MOTIONFIELD_SIMD")) {
        const std::string_view want(env);
        if (want == "scalar") {
            return Backend::scalar;
        }
        if (want == "avx2" && cpu_has_avx2()) {
            return Backend::avx2;
        }
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> backend{detect()};
    return backend;
}

}  // namespace

bool backend_available(Backend backend) {
    return backend == Backend::scalar || (backend == Backend::avx2 && cpu_has_avx2());
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
    require(backend_available(backend), ErrorKind::invalid_argument,
            std::string("SIMD backend not available: ") + backend_name(backend));
    current().store(backend, std::memory_order_relaxed);
}

const KernelTable& kernels(Backend backend) {
#if defined(MOTIONFIELD_HAVE_AVX2)
    if (backend == Backend::avx2) {
        return avx2_kernels();
    }
#else
    (void)backend;
#endif
    return scalar_kernels();
}

const KernelTable& kernels() { return kernels(active_backend()); }

const char* backend_name(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
    }
    return "unknown";
}

}  // namespace motionfield::simd
