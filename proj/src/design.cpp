#include "scmapolar/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scmapolar/mpa.hpp"
#include "scmapolar/parallel.hpp"
#include "scmapolar/schemes.hpp"

namespace scmapolar::design {
namespace {

using scma::cplx;

std::vector<std::uint8_t> random_bits(rng::Xoshiro256pp& gen, int n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(gen.next() & 1);
    return bits;
}

// Genie-aided run of the full SCMA chain for one frame; counts pooled over
// the K users.
struct ScmaWorker {
    const DesignConfig& cfg;
    const scma::ScmaCodebook& cb;
    mpa::MpaDetector det;
    mpa::MpaDetector::Workspace ws;
    int lm, n_sym;
    double sigma2;
    std::vector<polar::ScDecoder> genie;  // one (bipcm) or one per level (mlpc)
    std::vector<int> identity;
    FirstErrorHistogram local;

    // scratch
    std::vector<std::vector<cplx>> x;
    std::vector<cplx> r;
    std::vector<double> post_user;  // K x n_sym x M
    std::vector<std::uint8_t> err;

    explicit ScmaWorker(const DesignConfig& c)
        : cfg(c), cb(*c.codebook), det(&cb, c.mpa_iters) {
        lm = cb.bits_per_symbol;
        n_sym = cfg.n_code / lm;
        sigma2 = channel::sigma2_from_snr_db(cfg.design_snr_db, cfg.rate.value(), lm);
        if (cfg.scheme == Scheme::bipcm) {
            genie.emplace_back(polar::PolarCodeSpec::all_info(cfg.n_code));
        } else {
            for (int m = 0; m < lm; ++m)
                genie.emplace_back(polar::PolarCodeSpec::all_info(n_sym));
        }
        identity = schemes::identity_permutation(cfg.n_code);
        x.assign(cb.n_users, std::vector<cplx>(cb.n_resources));
        r.resize(cb.n_resources);
        post_user.resize(static_cast<std::size_t>(cb.n_users) * n_sym * cb.m_points);
        err.resize(cfg.n_code);
        local.n_code = cfg.n_code;
        local.counts.assign(cfg.n_code, 0);
        local.design_snr_db = cfg.design_snr_db;
    }

    std::span<double> posterior_row(int k, int t) {
        return {post_user.data() +
                    (static_cast<std::size_t>(k) * n_sym + t) * cb.m_points,
                static_cast<std::size_t>(cb.m_points)};
    }

    void run_frame(std::uint64_t frame) {
        const int K = cb.n_users;
        std::vector<std::vector<std::uint8_t>> u(K);
        std::vector<std::vector<int>> symbols(K);
        std::vector<std::vector<int>> pis(K);
        std::vector<std::vector<std::vector<std::uint8_t>>> level_cw(K);

        for (int k = 0; k < K; ++k) {
            auto gen = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::payload,
                                          static_cast<std::uint64_t>(k));
            u[k] = random_bits(gen, cfg.n_code);
            if (cfg.scheme == Scheme::bipcm) {
                const auto cw = polar::polar_transform(u[k]);
                const std::vector<int>& pi =
                    cfg.interleaver == InterleaverMode::identity
                        ? identity
                        : (pis[k] = schemes::make_interleaver(
                               cfg.n_code, schemes::interleaver_seed(cfg.master_seed, frame, k,
                                                                     cfg.interleaver)));
                const auto& gray = cb.labels(scma::Labeling::gray);
                symbols[k].resize(n_sym);
                for (int t = 0; t < n_sym; ++t) {
                    int label = 0;
                    for (int m = 0; m < lm; ++m) label = (label << 1) | cw[pi[t * lm + m]];
                    symbols[k][t] = gray[label];
                }
                if (cfg.interleaver == InterleaverMode::identity) pis[k] = identity;
            } else {
                // level m takes bits at global positions j*lm + m
                level_cw[k].resize(lm);
                std::vector<std::uint8_t> ul(n_sym);
                for (int m = 0; m < lm; ++m) {
                    for (int j = 0; j < n_sym; ++j) ul[j] = u[k][j * lm + m];
                    level_cw[k][m] = polar::polar_transform(ul);
                }
                const auto& sp = cb.labels(scma::Labeling::sp);
                symbols[k].resize(n_sym);
                for (int t = 0; t < n_sym; ++t) {
                    int label = 0;
                    for (int m = 0; m < lm; ++m) label = (label << 1) | level_cw[k][m][t];
                    symbols[k][t] = sp[label];
                }
            }
        }

        auto fading = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::fading);
        auto real = channel::draw_channel(cfg.channel, n_sym, K, fading, cfg.block_len);
        real.sigma2 = sigma2;
        auto noise = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::noise);

        for (int t = 0; t < n_sym; ++t) {
            for (int k = 0; k < K; ++k) scma::scma_modulate_into(k, symbols[k][t], cb, x[k]);
            channel::apply_channel_into(x, real, t, noise, r);
            const auto post = det.detect(r, real.use(t), sigma2, ws);
            for (int k = 0; k < K; ++k) {
                const auto src = post.row(k);
                std::copy(src.begin(), src.end(), posterior_row(k, t).begin());
            }
        }

        for (int k = 0; k < K; ++k) {
            if (cfg.scheme == Scheme::bipcm) {
                const auto& gray = cb.labels(scma::Labeling::gray);
                std::vector<double> llrs(cfg.n_code);
                for (int t = 0; t < n_sym; ++t) {
                    const auto bl = schemes::bit_llrs_from_posterior(posterior_row(k, t), gray, lm);
                    for (int m = 0; m < lm; ++m) llrs[pis[k][t * lm + m]] = bl[m];
                }
                genie[0].decode_genie(llrs, u[k], err);
                for (int p = 0; p < cfg.n_code; ++p)
                    if (err[p]) ++local.counts[p];
            } else {
                const auto& sp = cb.labels(scma::Labeling::sp);
                std::vector<double> llrs(n_sym);
                std::vector<std::uint8_t> known(lm);
                std::vector<std::uint8_t> ul(n_sym);
                std::vector<std::uint8_t> lvl_err(n_sym);
                for (int m = 0; m < lm; ++m) {
                    for (int t = 0; t < n_sym; ++t) {
                        for (int mm = 0; mm < m; ++mm) known[mm] = level_cw[k][mm][t];
                        llrs[t] = schemes::mlpc_level_llr(posterior_row(k, t), sp, lm, m,
                                                          {known.data(), static_cast<std::size_t>(m)});
                    }
                    for (int j = 0; j < n_sym; ++j) ul[j] = u[k][j * lm + m];
                    genie[m].decode_genie(llrs, ul, lvl_err);
                    for (int j = 0; j < n_sym; ++j)
                        if (lvl_err[j]) ++local.counts[j * lm + m];
                }
            }
            ++local.trials;
        }
    }
};

struct BscWorker {
    const DesignConfig& cfg;
    polar::ScDecoder genie;
    double llr_mag;
    FirstErrorHistogram local;
    std::vector<std::uint8_t> err;

    explicit BscWorker(const DesignConfig& c)
        : cfg(c), genie(polar::PolarCodeSpec::all_info(c.n_code)) {
        llr_mag = cfg.bsc_crossover > 0.0
                      ? std::log((1.0 - cfg.bsc_crossover) / cfg.bsc_crossover)
                      : kLlrSaturation;
        local.n_code = cfg.n_code;
        local.counts.assign(cfg.n_code, 0);
        local.design_snr_db = cfg.design_snr_db;
        err.resize(cfg.n_code);
    }

    void run_frame(std::uint64_t frame) {
        auto gen = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::payload);
        auto flips = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::flips);
        const auto u = random_bits(gen, cfg.n_code);
        auto y = polar::polar_transform(u);
        std::vector<double> llrs(cfg.n_code);
        for (int i = 0; i < cfg.n_code; ++i) {
            if (cfg.bsc_crossover > 0.0 && flips.bernoulli(cfg.bsc_crossover)) y[i] ^= 1;
            llrs[i] = y[i] ? -llr_mag : llr_mag;
        }
        genie.decode_genie(llrs, u, err);
        for (int p = 0; p < cfg.n_code; ++p)
            if (err[p]) ++local.counts[p];
        ++local.trials;
    }
};

template <class Worker>
void run_frames(const DesignConfig& cfg, std::uint64_t begin, std::uint64_t end,
                FirstErrorHistogram& hist) {
    const int n_workers = resolve_threads(cfg.threads);
    std::vector<Worker> workers;
    workers.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) workers.emplace_back(cfg);
    parallel_frames(begin, end, n_workers,
                    [&workers](std::uint64_t f, int w) { workers[w].run_frame(f); });
    for (const auto& w : workers) hist.merge(w.local);
}

}  // namespace

void FirstErrorHistogram::merge(const FirstErrorHistogram& other) {
    if (n_code == 0) {
        *this = other;
        return;
    }
    if (other.n_code != n_code) throw std::invalid_argument("histogram merge: size mismatch");
    for (int i = 0; i < n_code; ++i) counts[i] += other.counts[i];
    trials += other.trials;
}

void DesignConfig::validate() const {
    if (n_code < 2 || (n_code & (n_code - 1)) != 0)
        throw ConfigError("design: n_code must be a power of two >= 2");
    if (rate.value() <= 0.0 || rate.value() > 1.0) throw ConfigError("design: rate out of range");
    if (chain == DesignChain::scma) {
        if (codebook == nullptr) throw ConfigError("design: scma chain needs a codebook");
        if (n_code % codebook->bits_per_symbol != 0)
            throw ConfigError("design: n_code must be a multiple of bits per symbol");
        if (mpa_iters < 1) throw ConfigError("design: mpa_iters must be >= 1");
    } else {
        if (bsc_crossover < 0.0 || bsc_crossover >= 0.5)
            throw ConfigError("design: bsc crossover must be in [0, 0.5)");
    }
}

FirstErrorHistogram simulate_first_errors(const DesignConfig& cfg, std::uint64_t n_frames) {
    cfg.validate();
    if (n_frames < 1) throw std::invalid_argument("simulate_first_errors: need n_frames >= 1");
    FirstErrorHistogram hist;
    hist.n_code = cfg.n_code;
    hist.counts.assign(cfg.n_code, 0);
    hist.design_snr_db = cfg.design_snr_db;
    if (cfg.chain == DesignChain::scma)
        run_frames<ScmaWorker>(cfg, 0, n_frames, hist);
    else
        run_frames<BscWorker>(cfg, 0, n_frames, hist);
    return hist;
}

FirstErrorHistogram simulate_until_separated(const DesignConfig& cfg, int k_info,
                                             const AdaptiveBudget& budget) {
    cfg.validate();
    if (k_info < 1 || k_info > cfg.n_code)
        throw std::invalid_argument("simulate_until_separated: bad k_info");
    FirstErrorHistogram hist;
    hist.n_code = cfg.n_code;
    hist.counts.assign(cfg.n_code, 0);
    hist.design_snr_db = cfg.design_snr_db;

    std::uint64_t done = 0;
    while (done < budget.max_frames) {
        const std::uint64_t chunk = std::min(budget.chunk_frames, budget.max_frames - done);
        if (cfg.chain == DesignChain::scma)
            run_frames<ScmaWorker>(cfg, done, done + chunk, hist);
        else
            run_frames<BscWorker>(cfg, done, done + chunk, hist);
        done += chunk;
        if (k_info == cfg.n_code) break;
        auto sorted = hist.counts;
        std::sort(sorted.begin(), sorted.end());
        const double a = static_cast<double>(sorted[k_info - 1]);
        const double b = static_cast<double>(sorted[k_info]);
        if (b > a && (b - a) >= 3.0 * std::sqrt(a + b)) break;
    }
    return hist;
}

std::vector<polar::PolarCodeSpec> select_info_set(const FirstErrorHistogram& hist, int k_info,
                                                  Scheme scheme, int bits_per_symbol) {
    if (k_info < 0 || k_info > hist.n_code)
        throw std::invalid_argument("select_info_set: k_info exceeds n_code");
    std::vector<int> order(hist.n_code);
    std::iota(order.begin(), order.end(), 0);
    // fewest errors first; ties go to the higher (more polarized) index
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (hist.counts[a] != hist.counts[b]) return hist.counts[a] < hist.counts[b];
        return a > b;
    });
    order.resize(k_info);

    if (scheme == Scheme::bipcm) {
        polar::PolarCodeSpec spec;
        spec.n_code = hist.n_code;
        spec.info_set.assign(order.begin(), order.end());
        std::sort(spec.info_set.begin(), spec.info_set.end());
        spec.payload_len = k_info;
        spec.validate();
        return {spec};
    }

    const int lm = bits_per_symbol;
    std::vector<polar::PolarCodeSpec> specs(lm);
    for (int m = 0; m < lm; ++m) specs[m].n_code = hist.n_code / lm;
    for (int p : order) specs[p % lm].info_set.push_back(p / lm);
    for (auto& spec : specs) {
        std::sort(spec.info_set.begin(), spec.info_set.end());
        spec.payload_len = static_cast<int>(spec.info_set.size());
        spec.validate();
    }
    return specs;
}

polar::PolarCodeSpec with_crc(polar::PolarCodeSpec spec, int crc_len) {
    if (crc_len == 0) return spec;
    if (static_cast<int>(spec.info_set.size()) <= crc_len)
        throw ConfigError("code too small to carry a " + std::to_string(crc_len) + "-bit CRC");
    spec.crc_len = crc_len;
    spec.payload_len = static_cast<int>(spec.info_set.size()) - crc_len;
    spec.validate();
    return spec;
}

}  // namespace scmapolar::design
