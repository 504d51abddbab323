#include "scmapolar/kernels.hpp"

#include <bit>

namespace scmapolar::kernels {
namespace {

constexpr std::uint64_t kSignBit = 0x8000000000000000ULL;

void polar_f_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t ba = std::bit_cast<std::uint64_t>(a[i]);
        const std::uint64_t bb = std::bit_cast<std::uint64_t>(b[i]);
        const double aa = std::bit_cast<double>(ba & ~kSignBit);
        const double ab = std::bit_cast<double>(bb & ~kSignBit);
        const double m = aa < ab ? aa : ab;
        out[i] = std::bit_cast<double>(std::bit_cast<std::uint64_t>(m) | ((ba ^ bb) & kSignBit));
    }
}

void polar_g_scalar(const double* a, const double* b, const std::uint8_t* left, double* out,
                    std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = left[i] ? b[i] - a[i] : b[i] + a[i];
    }
}

void mpa_res_update_m4_scalar(const double* table, const double* wa, const double* wb,
                              double* out) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    for (int ca = 0; ca < 4; ++ca) {
        for (int cb = 0; cb < 4; ++cb) {
            const double w = wa[ca] * wb[cb];
            const double* t = table + ((ca << 2) + cb) * 4;
            acc0 += t[0] * w;
            acc1 += t[1] * w;
            acc2 += t[2] * w;
            acc3 += t[3] * w;
        }
    }
    out[0] = acc0;
    out[1] = acc1;
    out[2] = acc2;
    out[3] = acc3;
}

}  // namespace

const KernelTable& scalar() {
    static constexpr KernelTable table{"scalar", polar_f_scalar, polar_g_scalar,
                                       mpa_res_update_m4_scalar};
    return table;
}

}  // namespace scmapolar::kernels
