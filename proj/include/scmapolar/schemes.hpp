#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scmapolar/common.hpp"
#include "scmapolar/polar.hpp"
#include "scmapolar/scma.hpp"

namespace scmapolar::schemes {

/// Instrumentation for the symbol-probability -> bit-LLR conversion.
/// marginal_sums counts one unit per converted LLR (one marginalization of
/// the symbol posterior), the complexity unit compared across schemes.
struct LlrConversionStats {
    std::uint64_t marginal_sums = 0;
    std::uint64_t zero_prefix_events = 0;
};

std::vector<int> identity_permutation(int n);
/// Seeded Fisher-Yates permutation on [0, n).
std::vector<int> make_interleaver(int n, std::uint64_t seed);
std::vector<int> invert_permutation(std::span<const int> pi);

/// Interleaver seed for (master_seed, frame, user); fixed mode ignores the
/// frame index so every frame reuses one permutation per user.
std::uint64_t interleaver_seed(std::uint64_t master_seed, std::uint64_t frame, int user,
                               InterleaverMode mode);

struct BipcmFrame {
    std::vector<std::uint8_t> codeword;
    std::vector<int> interleaver;
    std::vector<int> symbol_indices;  // one codebook index per channel use
};

/// Single polar encode, interleave, chunk into bits_per_symbol tuples
/// (stream order = label bits, most significant first), Gray-map.
BipcmFrame bipcm_encode_frame(std::span<const std::uint8_t> payload,
                              const polar::PolarCodeSpec& spec, std::span<const int> interleaver,
                              const scma::ScmaCodebook& cb);

/// Bit LLRs of one symbol from its posterior: llr[m] = log(P{bit m = 0} /
/// P{bit m = 1}) with label-bit marginals summed over the posterior,
/// saturated at +/-kLlrSaturation.
std::vector<double> bit_llrs_from_posterior(std::span<const double> post,
                                            std::span<const int> label_to_index,
                                            int bits_per_symbol,
                                            LlrConversionStats* stats = nullptr);

/// posteriors is row-major (n_symbols x M) for one user.
std::vector<std::uint8_t> bipcm_decode_frame(std::span<const double> posteriors,
                                             const polar::PolarCodeSpec& spec,
                                             std::span<const int> interleaver,
                                             const scma::ScmaCodebook& cb, int list_size,
                                             LlrConversionStats* stats = nullptr);

struct MlpcFrame {
    std::vector<std::vector<std::uint8_t>> level_codewords;
    std::vector<int> symbol_indices;
};

/// One polar encoder per bit level; symbol t carries bit t of every level
/// codeword, mapped through the set-partitioning labels.  The payload is
/// split across levels in level order.
MlpcFrame mlpc_encode_frame(std::span<const std::uint8_t> payload,
                            std::span<const polar::PolarCodeSpec> level_specs,
                            const scma::ScmaCodebook& cb);

/// Conditional bit LLR of level m (0-based) given hard bits of levels < m.
/// A zero-probability prefix yields LLR 0 and bumps stats->zero_prefix_events.
double mlpc_level_llr(std::span<const double> post, std::span<const int> label_to_index,
                      int bits_per_symbol, int level, std::span<const std::uint8_t> known_bits,
                      LlrConversionStats* stats = nullptr);

struct MlpcDecodeDiag {
    std::vector<std::vector<double>> level_llrs;
};

/// Multistage decoding: levels decoded in order, each conditioned on the
/// re-encoded hard codeword bits of the already-decoded levels.
std::vector<std::uint8_t> mlpc_decode_frame(std::span<const double> posteriors,
                                            std::span<const polar::PolarCodeSpec> level_specs,
                                            const scma::ScmaCodebook& cb, int list_size,
                                            LlrConversionStats* stats = nullptr,
                                            MlpcDecodeDiag* diag = nullptr);

}  // namespace scmapolar::schemes
