#include "scmapolar/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

namespace scmapolar::kernels {
namespace {

bool cpu_supports_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& pick() {
    const KernelTable* vec = cpu_supports_avx2_fma() ? avx2() : nullptr;
    const char* env = std::getenv("SCMAPOLAR_KERNELS");
    if (env != nullptr) {
        const std::string want(env);
        if (want == "scalar") return scalar();
        if (want == "avx2") {
            if (vec != nullptr) return *vec;
            std::fprintf(stderr, "scmapolar: AVX2 kernels unavailable, using scalar\n");
            return scalar();
        }
        std::fprintf(stderr, "scmapolar: unknown SCMAPOLAR_KERNELS='%s', using default\n", env);
    }
    return vec != nullptr ? *vec : scalar();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& table = pick();
    return table;
}

}  // namespace scmapolar::kernels
