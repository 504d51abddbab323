#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scmapolar/common.hpp"
#include "scmapolar/kernels.hpp"

namespace scmapolar::polar {

/// Frozen/information partition of a polar code in natural (non-bit-reversed)
/// transform order.  The information set is kept sorted ascending; payload
/// bits occupy its first payload_len positions and CRC bits (when enabled)
/// its last crc_len positions, both in encoding order.
struct PolarCodeSpec {
    int n_code = 0;
    std::vector<int> info_set;
    int crc_len = 0;
    int payload_len = 0;

    void validate() const;  // throws std::invalid_argument on broken invariants

    /// Every position is an information bit; used by the code-construction run.
    static PolarCodeSpec all_info(int n_code);
};

/// Per-codeword LLRs in codeword order; positive favours bit 0.  Decoders
/// clip magnitudes to kLlrSaturation on ingest.
struct LlrFrame {
    std::vector<double> values;
};

/// Bitwise CRC over a bit sequence, MSB-first shift register, zero init, no
/// reflection.  crc_len selects the polynomial: 8 -> 0x07, 16 -> 0x1021.
std::uint32_t crc_bits(std::span<const std::uint8_t> bits, int crc_len);
std::uint32_t crc_polynomial(int crc_len);

/// x = u * F^(xn) over GF(2), F = [[1,0],[1,1]], natural ordering.
/// Involutive; throws std::invalid_argument unless |u| is a power of two.
std::vector<std::uint8_t> polar_transform(std::span<const std::uint8_t> u);

/// Scatter payload (and CRC when enabled) into the information set, zero the
/// frozen positions, and apply the transform.
std::vector<std::uint8_t> polar_encode(std::span<const std::uint8_t> payload,
                                       const PolarCodeSpec& spec);

struct ScResult {
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> codeword;
};

/// Successive cancellation decoder.  Reusable: one instance per worker,
/// decode() resets all state.  CRC bits are stripped from the returned
/// payload but not checked.
class ScDecoder {
public:
    explicit ScDecoder(PolarCodeSpec spec);

    ScResult decode(const LlrFrame& llrs);

    /// Genie-aided pass over every position: the raw decision at position i is
    /// compared against true_u[i] and first_error[i] is set on mismatch, then
    /// the true bit is fed back so later positions see a corrected history.
    void decode_genie(std::span<const double> llrs, std::span<const std::uint8_t> true_u,
                      std::span<std::uint8_t> first_error);

    const PolarCodeSpec& spec() const { return spec_; }

private:
    void run(std::span<const double> llrs);
    void rec(int stage, int leaf_base);

    PolarCodeSpec spec_;
    int n_stages_;
    std::vector<int> stage_off_;
    std::vector<double> llr_;
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint8_t> frozen_;
    std::vector<std::uint8_t> u_;
    const std::uint8_t* genie_ = nullptr;
    std::uint8_t* err_ = nullptr;
    const kernels::KernelTable* kt_;
};

struct SclResult {
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> codeword;
    double path_metric = 0.0;
    bool crc_ok = false;
};

/// CRC-aided successive cancellation list decoder with the LLR-domain path
/// metric (a path accrues |llr| when it decides against the llr sign).
/// Stage buffers are pooled and shared between paths copy-on-write, so path
/// cloning costs O(log n) until a stage is actually written.
class SclDecoder {
public:
    SclDecoder(PolarCodeSpec spec, int list_size);

    SclResult decode(const LlrFrame& llrs);

    /// Records min-over-paths path metric after every decoded position; the
    /// sequence is non-decreasing by construction.
    void set_metric_trace(std::vector<double>* trace) { trace_ = trace; }

    const PolarCodeSpec& spec() const { return spec_; }
    int list_size() const { return list_size_; }

private:
    struct StagePool {
        int size = 0;
        std::vector<double> llr;
        std::vector<std::uint8_t> bits;
        std::vector<int> ref;
        std::vector<int> of_path;
        std::vector<int> free_list;
    };

    int alloc_array(int stage);
    void release_array(int stage, int arr);
    void make_unique(int stage, int path);
    const double* llr_r(int stage, int path) const;
    double* llr_w(int stage, int path);
    const std::uint8_t* bits_r(int stage, int path) const;
    std::uint8_t* bits_w(int stage, int path);
    int clone_path(int path);
    void kill_path(int path);
    void rec(int stage, int leaf_base);
    void leaf(int phi);

    PolarCodeSpec spec_;
    int list_size_;
    int n_stages_;
    std::vector<StagePool> stages_;
    std::vector<double> pm_;
    std::vector<std::uint8_t> active_;
    std::vector<int> free_paths_;
    std::vector<std::vector<std::uint8_t>> u_;
    std::vector<std::uint8_t> frozen_;
    std::vector<double>* trace_ = nullptr;
    const kernels::KernelTable* kt_;
};

/// Frozen-set file metadata beyond the code spec itself.
struct FrozenSetMeta {
    double design_snr_db = 0.0;
    std::string scheme = "bipcm";
};

void save_frozen_set(const std::string& path, const PolarCodeSpec& spec, const FrozenSetMeta& meta);
std::pair<PolarCodeSpec, FrozenSetMeta> load_frozen_set(const std::string& path);

}  // namespace scmapolar::polar
