#include "nonloc/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace nonloc {

#if defined(__x86_64__) || defined(_M_X64)
const KernelBackend* avx2_backend_impl();
#endif
#if defined(__aarch64__)
const KernelBackend* neon_backend_impl();
#endif

const KernelBackend* simd_backend() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return avx2_backend_impl();
    return nullptr;
#elif defined(__aarch64__)
    return neon_backend_impl();
#else
    return nullptr;
#endif
}

namespace {

std::atomic<const KernelBackend*> g_active{nullptr};

const KernelBackend* resolve_default() {
    if (const char* env = std::getenv("NONLOC_KERNELS")) {
        std::string want(env);
        if (want == "scalar") return &scalar_backend();
        if (const KernelBackend* s = simd_backend(); s && want == s->name) return s;
        // unknown or unavailable request in the env var: fall through to auto
    }
    if (const KernelBackend* s = simd_backend()) return s;
    return &scalar_backend();
}

} // namespace

const KernelBackend& active_backend() {
    const KernelBackend* b = g_active.load();
    if (!b) {
        b = resolve_default();
        g_active.store(b);
    }
    return *b;
}

bool select_backend(const std::string& name) {
    if (name == "auto") {
        const KernelBackend* s = simd_backend();
        g_active.store(s ? s : &scalar_backend());
        return true;
    }
    if (name == "scalar") {
        g_active.store(&scalar_backend());
        return true;
    }
    if (const KernelBackend* s = simd_backend(); s && name == s->name) {
        g_active.store(s);
        return true;
    }
    return false;
}

} // namespace nonloc
