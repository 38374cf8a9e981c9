#include <atomic>
#include <cstdlib>
#include <cstring>

#include "hwr/errors.hpp"
#include "hwr/simd.hpp"

namespace hwr::simd {

namespace {

const Kernels* pick_default() {
    const char* env = std::getenv("HWR_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
    if (avx2_supported()) return avx2_kernels();
    return &scalar_kernels();
}

std::atomic<const Kernels*>& slot() {
    static std::atomic<const Kernels*> active{pick_default()};
    return active;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    if (!avx2_kernels()) return false;
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels& kernels() { return *slot().load(std::memory_order_acquire); }

Isa active_isa() { return kernels().isa; }

void set_isa(Isa isa) {
    if (isa == Isa::Avx2) {
        if (!avx2_supported()) fail(ErrorKind::InvalidArgument, "AVX2 kernels unavailable on this CPU");
        slot().store(avx2_kernels(), std::memory_order_release);
    } else {
        slot().store(&scalar_kernels(), std::memory_order_release);
    }
}

}  // namespace hwr::simd
