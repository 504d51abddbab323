#include "scmapolar/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

namespace scmapolar::kernels {
namespace {

__attribute__((target("avx2,fma"))) void polar_f_avx2(const double* a, const double* b,
                                                      double* out, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        const __m256d sign = _mm256_and_pd(_mm256_xor_pd(va, vb), sign_mask);
        const __m256d mag =
            _mm256_min_pd(_mm256_andnot_pd(sign_mask, va), _mm256_andnot_pd(sign_mask, vb));
        _mm256_storeu_pd(out + i, _mm256_or_pd(mag, sign));
    }
    if (i < n) scalar().polar_f(a + i, b + i, out + i, n - i);
}

__attribute__((target("avx2,fma"))) void polar_g_avx2(const double* a, const double* b,
                                                      const std::uint8_t* left, double* out,
                                                      std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        std::uint32_t packed;
        std::memcpy(&packed, left + i, 4);
        const __m256i lanes = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(packed)));
        const __m256d sign = _mm256_castsi256_pd(_mm256_slli_epi64(lanes, 63));
        _mm256_storeu_pd(out + i, _mm256_add_pd(vb, _mm256_xor_pd(va, sign)));
    }
    if (i < n) scalar().polar_g(a + i, b + i, left + i, out + i, n - i);
}

__attribute__((target("avx2,fma"))) void mpa_res_update_m4_avx2(const double* table,
                                                                const double* wa, const double* wb,
                                                                double* out) {
    __m256d acc = _mm256_setzero_pd();
    for (int ca = 0; ca < 4; ++ca) {
        const __m256d va = _mm256_set1_pd(wa[ca]);
        for (int cb = 0; cb < 4; ++cb) {
            const __m256d w = _mm256_mul_pd(va, _mm256_set1_pd(wb[cb]));
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(table + ((ca << 2) + cb) * 4), w, acc);
        }
    }
    _mm256_storeu_pd(out, acc);
}

}  // namespace

const KernelTable* avx2() {
    static constexpr KernelTable table{"avx2", polar_f_avx2, polar_g_avx2, mpa_res_update_m4_avx2};
    return &table;
}

}  // namespace scmapolar::kernels

#else

namespace scmapolar::kernels {
const KernelTable* avx2() { return nullptr; }
}  // namespace scmapolar::kernels

#endif
