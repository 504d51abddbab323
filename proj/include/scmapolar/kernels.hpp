#pragma once

#include <cstddef>
#include <cstdint>

namespace scmapolar::kernels {

// Hot-loop primitives.  Scalar versions are the reference semantics; the AVX2
// versions must match them (bitwise for f/g, to tight tolerance for the FMA
// reduction) and are selected once at startup.

/// out[i] = sign(a[i]) * sign(b[i]) * min(|a[i]|, |b[i]|)
using PolarFFn = void (*)(const double* a, const double* b, double* out, std::size_t n);

/// out[i] = b[i] + (left[i] ? -a[i] : a[i]),  left[i] in {0,1}
using PolarGFn = void (*)(const double* a, const double* b, const std::uint8_t* left, double* out,
                          std::size_t n);

/// 16-combination resource-node reduction for M=4, degree-3 graphs.
/// table is laid out target-index fastest: table[(ca*4+cb)*4 + i].
/// out[i] = sum_{ca,cb} table[(ca*4+cb)*4 + i] * wa[ca] * wb[cb]
using MpaResUpdateM4Fn = void (*)(const double* table, const double* wa, const double* wb,
                                  double* out);

struct KernelTable {
    const char* name;
    PolarFFn polar_f;
    PolarGFn polar_g;
    MpaResUpdateM4Fn mpa_res_update_m4;
};

/// Portable reference kernels.
const KernelTable& scalar();

/// AVX2+FMA kernels, or nullptr when not compiled for this target.
const KernelTable* avx2();

/// Runtime-selected table: AVX2 when the CPU supports it, else scalar.
/// Overridable with SCMAPOLAR_KERNELS=scalar|avx2 (falls back with a warning
/// if the requested set is unavailable).
const KernelTable& active();

}  // namespace scmapolar::kernels
