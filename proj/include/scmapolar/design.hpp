#pragma once

#include <cstdint>
#include <vector>

#include "scmapolar/channel.hpp"
#include "scmapolar/common.hpp"
#include "scmapolar/polar.hpp"
#include "scmapolar/scma.hpp"

namespace scmapolar::design {

/// Per-position first-error counts from the genie-aided construction run.
/// trials counts decoded codewords (frames x users for the SCMA chain).
struct FirstErrorHistogram {
    int n_code = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t trials = 0;
    double design_snr_db = 0.0;

    void merge(const FirstErrorHistogram& other);
};

/// What the construction simulates: the full SCMA chain, or a binary
/// symmetric channel stub used by validation suites.
enum class DesignChain { scma, bsc };

struct DesignConfig {
    Scheme scheme = Scheme::bipcm;
    DesignChain chain = DesignChain::scma;
    int n_code = 256;
    Rational rate{1, 2};
    double design_snr_db = 8.0;
    const scma::ScmaCodebook* codebook = nullptr;  // required for the scma chain
    channel::FadingModel channel = channel::FadingModel::fast;
    int block_len = 18;
    int mpa_iters = 6;
    InterleaverMode interleaver = InterleaverMode::per_frame;
    double bsc_crossover = 0.05;
    std::uint64_t master_seed = 1;
    int threads = 0;

    void validate() const;
};

/// Run exactly n_frames genie-aided frames and count, per position, how often
/// the raw successive-cancellation decision disagrees with the true bit when
/// all earlier decisions are corrected.  Deterministic given the seed and
/// independent of thread count.
FirstErrorHistogram simulate_first_errors(const DesignConfig& cfg, std::uint64_t n_frames);

struct AdaptiveBudget {
    std::uint64_t chunk_frames = 2048;
    std::uint64_t max_frames = 200000;
};

/// Grow the frame budget in chunks until the sorted counts around the k_info
/// boundary are separated by >= 3 combined standard deviations (or the cap is
/// reached).
FirstErrorHistogram simulate_until_separated(const DesignConfig& cfg, int k_info,
                                             const AdaptiveBudget& budget);

/// Pick the k_info lowest-count positions (ties to the higher index).  For
/// BIPCM this yields one spec over n_code; for MLPC the positions partition
/// by level (position p belongs to level p mod L under the symbol-major
/// layout) into one spec per level, sizes summing to k_info.
/// Returned specs carry crc_len = 0; callers carve CRC afterwards.
std::vector<polar::PolarCodeSpec> select_info_set(const FirstErrorHistogram& hist, int k_info,
                                                  Scheme scheme, int bits_per_symbol);

/// Convert trailing information positions into CRC bits.
polar::PolarCodeSpec with_crc(polar::PolarCodeSpec spec, int crc_len);

}  // namespace scmapolar::design
