#include "scmapolar/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scmapolar/rng.hpp"

namespace scmapolar::schemes {
namespace {

double saturated_log_ratio(double p0, double p1) {
    if (p0 > 0.0 && p1 > 0.0) {
        const double v = std::log(p0 / p1);
        return std::clamp(v, -kLlrSaturation, kLlrSaturation);
    }
    if (p0 > 0.0) return kLlrSaturation;
    if (p1 > 0.0) return -kLlrSaturation;
    return 0.0;
}

int label_bit(int label, int bits_per_symbol, int level) {
    return (label >> (bits_per_symbol - 1 - level)) & 1;
}

std::vector<std::uint8_t> decode_frame(const polar::LlrFrame& llrs,
                                       const polar::PolarCodeSpec& spec, int list_size,
                                       std::vector<std::uint8_t>* codeword_out) {
    if (list_size <= 1 && spec.crc_len == 0) {
        polar::ScDecoder dec(spec);
        auto res = dec.decode(llrs);
        if (codeword_out) *codeword_out = std::move(res.codeword);
        return res.payload;
    }
    polar::SclDecoder dec(spec, std::max(1, list_size));
    auto res = dec.decode(llrs);
    if (codeword_out) *codeword_out = std::move(res.codeword);
    return res.payload;
}

}  // namespace

std::vector<int> identity_permutation(int n) {
    std::vector<int> pi(n);
    for (int i = 0; i < n; ++i) pi[i] = i;
    return pi;
}

std::vector<int> make_interleaver(int n, std::uint64_t seed) {
    std::vector<int> pi = identity_permutation(n);
    rng::Xoshiro256pp gen(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(gen.uniform_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(pi[i], pi[j]);
    }
    return pi;
}

std::vector<int> invert_permutation(std::span<const int> pi) {
    std::vector<int> inv(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) inv[pi[i]] = static_cast<int>(i);
    return inv;
}

std::uint64_t interleaver_seed(std::uint64_t master_seed, std::uint64_t frame, int user,
                               InterleaverMode mode) {
    const std::uint64_t f = mode == InterleaverMode::per_frame ? frame : 0;
    auto gen = rng::derive_stream(master_seed, f, rng::StreamKind::interleaver,
                                  static_cast<std::uint64_t>(user));
    return gen.next();
}

BipcmFrame bipcm_encode_frame(std::span<const std::uint8_t> payload,
                              const polar::PolarCodeSpec& spec, std::span<const int> interleaver,
                              const scma::ScmaCodebook& cb) {
    if (static_cast<int>(interleaver.size()) != spec.n_code)
        throw std::invalid_argument("bipcm_encode_frame: interleaver length mismatch");
    if (spec.n_code % cb.bits_per_symbol != 0)
        throw std::invalid_argument("bipcm_encode_frame: n_code not a multiple of bits/symbol");
    BipcmFrame frame;
    frame.codeword = polar::polar_encode(payload, spec);
    frame.interleaver.assign(interleaver.begin(), interleaver.end());
    const int lm = cb.bits_per_symbol;
    const int n_sym = spec.n_code / lm;
    frame.symbol_indices.resize(n_sym);
    const auto& gray = cb.labels(scma::Labeling::gray);
    for (int t = 0; t < n_sym; ++t) {
        int label = 0;
        for (int m = 0; m < lm; ++m)
            label = (label << 1) | frame.codeword[interleaver[t * lm + m]];
        frame.symbol_indices[t] = gray[label];
    }
    return frame;
}

std::vector<double> bit_llrs_from_posterior(std::span<const double> post,
                                            std::span<const int> label_to_index,
                                            int bits_per_symbol, LlrConversionStats* stats) {
    const int m_points = static_cast<int>(post.size());
    std::vector<double> llrs(bits_per_symbol);
    for (int m = 0; m < bits_per_symbol; ++m) {
        double p0 = 0.0, p1 = 0.0;
        for (int label = 0; label < m_points; ++label) {
            const double pr = post[label_to_index[label]];
            if (label_bit(label, bits_per_symbol, m) == 0)
                p0 += pr;
            else
                p1 += pr;
        }
        if (stats) ++stats->marginal_sums;
        llrs[m] = saturated_log_ratio(p0, p1);
    }
    return llrs;
}

std::vector<std::uint8_t> bipcm_decode_frame(std::span<const double> posteriors,
                                             const polar::PolarCodeSpec& spec,
                                             std::span<const int> interleaver,
                                             const scma::ScmaCodebook& cb, int list_size,
                                             LlrConversionStats* stats) {
    const int lm = cb.bits_per_symbol;
    const int n_sym = spec.n_code / lm;
    if (posteriors.size() != static_cast<std::size_t>(n_sym) * cb.m_points)
        throw std::invalid_argument("bipcm_decode_frame: posterior size mismatch");
    polar::LlrFrame llrs;
    llrs.values.resize(spec.n_code);
    const auto& gray = cb.labels(scma::Labeling::gray);
    for (int t = 0; t < n_sym; ++t) {
        const auto bit_llrs = bit_llrs_from_posterior(
            posteriors.subspan(static_cast<std::size_t>(t) * cb.m_points,
                               static_cast<std::size_t>(cb.m_points)),
            gray, lm, stats);
        for (int m = 0; m < lm; ++m) llrs.values[interleaver[t * lm + m]] = bit_llrs[m];
    }
    return decode_frame(llrs, spec, list_size, nullptr);
}

MlpcFrame mlpc_encode_frame(std::span<const std::uint8_t> payload,
                            std::span<const polar::PolarCodeSpec> level_specs,
                            const scma::ScmaCodebook& cb) {
    const int lm = cb.bits_per_symbol;
    if (static_cast<int>(level_specs.size()) != lm)
        throw std::invalid_argument("mlpc_encode_frame: need one spec per bit level");
    int total = 0;
    for (const auto& spec : level_specs) {
        if (spec.n_code != level_specs[0].n_code)
            throw std::invalid_argument("mlpc_encode_frame: level lengths differ");
        total += spec.payload_len;
    }
    if (static_cast<int>(payload.size()) != total)
        throw std::invalid_argument("mlpc_encode_frame: payload length mismatch");

    MlpcFrame frame;
    const int n_sym = level_specs[0].n_code;
    std::size_t off = 0;
    for (const auto& spec : level_specs) {
        frame.level_codewords.push_back(
            polar::polar_encode(payload.subspan(off, spec.payload_len), spec));
        off += spec.payload_len;
    }
    const auto& sp = cb.labels(scma::Labeling::sp);
    frame.symbol_indices.resize(n_sym);
    for (int t = 0; t < n_sym; ++t) {
        int label = 0;
        for (int m = 0; m < lm; ++m) label = (label << 1) | frame.level_codewords[m][t];
        frame.symbol_indices[t] = sp[label];
    }
    return frame;
}

double mlpc_level_llr(std::span<const double> post, std::span<const int> label_to_index,
                      int bits_per_symbol, int level, std::span<const std::uint8_t> known_bits,
                      LlrConversionStats* stats) {
    if (static_cast<int>(known_bits.size()) != level)
        throw std::invalid_argument("mlpc_level_llr: need one known bit per lower level");
    int prefix = 0;
    for (int m = 0; m < level; ++m) prefix = (prefix << 1) | (known_bits[m] & 1);
    const int free_bits = bits_per_symbol - level - 1;
    double p0 = 0.0, p1 = 0.0;
    for (int suffix = 0; suffix < (1 << free_bits); ++suffix) {
        const int base = prefix << (bits_per_symbol - level);
        p0 += post[label_to_index[base | (0 << free_bits) | suffix]];
        p1 += post[label_to_index[base | (1 << free_bits) | suffix]];
    }
    if (stats) {
        ++stats->marginal_sums;
        if (p0 == 0.0 && p1 == 0.0) ++stats->zero_prefix_events;
    }
    return saturated_log_ratio(p0, p1);
}

std::vector<std::uint8_t> mlpc_decode_frame(std::span<const double> posteriors,
                                            std::span<const polar::PolarCodeSpec> level_specs,
                                            const scma::ScmaCodebook& cb, int list_size,
                                            LlrConversionStats* stats, MlpcDecodeDiag* diag) {
    const int lm = cb.bits_per_symbol;
    if (static_cast<int>(level_specs.size()) != lm)
        throw std::invalid_argument("mlpc_decode_frame: need one spec per bit level");
    const int n_sym = level_specs[0].n_code;
    if (posteriors.size() != static_cast<std::size_t>(n_sym) * cb.m_points)
        throw std::invalid_argument("mlpc_decode_frame: posterior size mismatch");

    const auto& sp = cb.labels(scma::Labeling::sp);
    std::vector<std::uint8_t> decided(static_cast<std::size_t>(n_sym) * lm, 0);
    std::vector<std::uint8_t> payload;
    if (diag) diag->level_llrs.assign(lm, {});

    for (int m = 0; m < lm; ++m) {
        polar::LlrFrame llrs;
        llrs.values.resize(n_sym);
        for (int t = 0; t < n_sym; ++t) {
            llrs.values[t] = mlpc_level_llr(
                posteriors.subspan(static_cast<std::size_t>(t) * cb.m_points,
                                   static_cast<std::size_t>(cb.m_points)),
                sp, lm, m, {decided.data() + static_cast<std::size_t>(t) * lm,
                            static_cast<std::size_t>(m)},
                stats);
        }
        if (diag) diag->level_llrs[m] = llrs.values;
        std::vector<std::uint8_t> codeword;
        auto level_payload = decode_frame(llrs, level_specs[m], list_size, &codeword);
        payload.insert(payload.end(), level_payload.begin(), level_payload.end());
        for (int t = 0; t < n_sym; ++t)
            decided[static_cast<std::size_t>(t) * lm + m] = codeword[t];
    }
    return payload;
}

}  // namespace scmapolar::schemes
