#include "scmapolar/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "scmapolar/design.hpp"
#include "scmapolar/mpa.hpp"
#include "scmapolar/parallel.hpp"
#include "scmapolar/polar.hpp"
#include "scmapolar/rng.hpp"
#include "scmapolar/schemes.hpp"

namespace scmapolar::harness {
namespace {

using scma::cplx;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
}

}  // namespace

int SimConfig::payload_len(int bits_per_symbol) const {
    const long long total = rate.num * static_cast<long long>(n_code) / rate.den;
    const int crc_total = crc_len * (scheme == Scheme::mlpc ? bits_per_symbol : 1);
    const int payload = crc_in_rate ? static_cast<int>(total) - crc_total
                                    : static_cast<int>(total);
    if (payload < 1) throw ConfigError("rate/CRC leave no payload bits");
    return payload;
}

int SimConfig::k_info(int bits_per_symbol) const {
    const int crc_total = crc_len * (scheme == Scheme::mlpc ? bits_per_symbol : 1);
    const int k = payload_len(bits_per_symbol) + crc_total;
    if (k > n_code) throw ConfigError("information set exceeds code length");
    return k;
}

void SimConfig::validate() const {
    if (n_code < 2 || (n_code & (n_code - 1)) != 0)
        throw ConfigError("n_code must be a power of two >= 2");
    if (list_size < 1) throw ConfigError("list_size must be >= 1");
    if (crc_len != 0 && crc_len != 8 && crc_len != 16)
        throw ConfigError("crc_len must be 0, 8 or 16");
    if (rate.value() <= 0.0 || rate.value() > 1.0) throw ConfigError("rate out of range (0,1]");
    for (std::size_t i = 1; i < snr_db.size(); ++i)
        if (snr_db[i] <= snr_db[i - 1]) throw ConfigError("snr grid must be ascending");
    if (mpa_iters < 1) throw ConfigError("mpa_iters must be >= 1");
    if (block_len < 1) throw ConfigError("block_len must be >= 1");
    if (min_frame_errors < 1) throw ConfigError("min_frame_errors must be >= 1");
    if (max_frames < 1) throw ConfigError("max_frames must be >= 1");
}

void apply_kv(SimConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string value = trim(raw_value);
    if (key == "scheme") {
        if (value == "bipcm") cfg.scheme = Scheme::bipcm;
        else if (value == "mlpc") cfg.scheme = Scheme::mlpc;
        else throw ConfigError("scheme must be bipcm or mlpc");
    } else if (key == "decoder") {
        if (value == "sc") cfg.decoder = DecoderKind::sc;
        else if (value == "scl") cfg.decoder = DecoderKind::scl;
        else throw ConfigError("decoder must be sc or scl");
    } else if (key == "list_size") {
        cfg.list_size = static_cast<int>(parse_u64(value, key));
    } else if (key == "crc_len") {
        cfg.crc_len = static_cast<int>(parse_u64(value, key));
    } else if (key == "n_code") {
        cfg.n_code = static_cast<int>(parse_u64(value, key));
    } else if (key == "rate") {
        cfg.rate = Rational::parse(value);
    } else if (key == "codebook") {
        cfg.codebook_path = value;
    } else if (key == "frozen_set") {
        cfg.frozen_set_paths.clear();
        for (const auto& p : split(value, ','))
            if (!trim(p).empty()) cfg.frozen_set_paths.push_back(trim(p));
    } else if (key == "channel") {
        if (value == "fast") cfg.channel_model = channel::FadingModel::fast;
        else if (value == "block") cfg.channel_model = channel::FadingModel::block;
        else throw ConfigError("channel must be fast or block");
    } else if (key == "block_len") {
        cfg.block_len = static_cast<int>(parse_u64(value, key));
    } else if (key == "mpa_iters") {
        cfg.mpa_iters = static_cast<int>(parse_u64(value, key));
    } else if (key == "snr_db") {
        cfg.snr_db.clear();
        for (const auto& p : split(value, ','))
            if (!trim(p).empty()) cfg.snr_db.push_back(parse_double(trim(p), key));
    } else if (key == "master_seed") {
        cfg.master_seed = parse_u64(value, key);
    } else if (key == "min_frame_errors") {
        cfg.min_frame_errors = parse_u64(value, key);
    } else if (key == "max_frames") {
        cfg.max_frames = parse_u64(value, key);
    } else if (key == "threads") {
        cfg.threads = static_cast<int>(parse_u64(value, key));
    } else if (key == "out") {
        cfg.out_path = value;
    } else if (key == "interleaver") {
        if (value == "per_frame") cfg.interleaver = InterleaverMode::per_frame;
        else if (value == "fixed") cfg.interleaver = InterleaverMode::fixed;
        else if (value == "identity") cfg.interleaver = InterleaverMode::identity;
        else throw ConfigError("interleaver must be per_frame, fixed or identity");
    } else if (key == "crc_in_rate") {
        cfg.crc_in_rate = (value == "1" || value == "true");
    } else if (key == "design_snr_db") {
        cfg.design_snr_db = parse_double(value, key);
    } else if (key == "design_frames") {
        cfg.design_frames = parse_u64(value, key);
    } else if (key == "design_max_frames") {
        cfg.design_max_frames = parse_u64(value, key);
    } else {
        throw ConfigError("unknown config key: '" + key + "'");
    }
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    SimConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_kv(cfg, t.substr(0, eq), t.substr(eq + 1));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// FER experiment
// ---------------------------------------------------------------------------

namespace {

struct PreparedSim {
    const SimConfig& cfg;
    scma::ScmaCodebook cb;
    std::vector<polar::PolarCodeSpec> specs;
    int lm = 0;
    int n_sym = 0;
    int payload = 0;
    int list = 1;

    explicit PreparedSim(const SimConfig& c) : cfg(c) {
        cfg.validate();
        if (cfg.snr_db.empty()) throw ConfigError("snr grid is empty");
        if (cfg.codebook_path.empty()) throw ConfigError("codebook path not set");
        cb = scma::load_codebook(cfg.codebook_path);
        lm = cb.bits_per_symbol;
        if (cfg.n_code % lm != 0) throw ConfigError("n_code must be a multiple of bits per symbol");
        n_sym = cfg.n_code / lm;
        payload = cfg.payload_len(lm);
        list = cfg.decoder == DecoderKind::sc ? 1 : cfg.list_size;

        const std::size_t want = cfg.scheme == Scheme::bipcm ? 1 : static_cast<std::size_t>(lm);
        if (cfg.frozen_set_paths.size() != want)
            throw ConfigError("expected " + std::to_string(want) + " frozen-set path(s)");
        int payload_sum = 0;
        for (const auto& path : cfg.frozen_set_paths) {
            auto [spec, meta] = polar::load_frozen_set(path);
            const int expect_n = cfg.scheme == Scheme::bipcm ? cfg.n_code : n_sym;
            if (spec.n_code != expect_n)
                throw ConfigError("frozen set " + path + " has wrong code length");
            if (spec.crc_len != cfg.crc_len)
                throw ConfigError("frozen set " + path + " carries a different crc_len");
            payload_sum += spec.payload_len;
            specs.push_back(std::move(spec));
        }
        if (payload_sum != payload)
            throw ConfigError("frozen sets carry " + std::to_string(payload_sum) +
                              " payload bits, config wants " + std::to_string(payload));
    }
};

struct FrameWorker {
    const PreparedSim& sim;
    mpa::MpaDetector det;
    mpa::MpaDetector::Workspace ws;
    std::vector<polar::ScDecoder> sc;
    std::vector<polar::SclDecoder> scl;
    std::vector<std::vector<cplx>> x;
    std::vector<cplx> r;
    std::vector<double> post_user;  // K x n_sym x M
    std::vector<int> identity;

    std::uint64_t frames = 0;
    std::uint64_t frame_errors = 0;
    std::vector<std::uint64_t> user_errors;

    explicit FrameWorker(const PreparedSim& s) : sim(s), det(&s.cb, s.cfg.mpa_iters) {
        x.assign(sim.cb.n_users, std::vector<cplx>(sim.cb.n_resources));
        r.resize(sim.cb.n_resources);
        post_user.resize(static_cast<std::size_t>(sim.cb.n_users) * sim.n_sym * sim.cb.m_points);
        identity = schemes::identity_permutation(sim.cfg.n_code);
        user_errors.assign(sim.cb.n_users, 0);
    }

    std::span<double> posterior_rows(int k) {
        return {post_user.data() + static_cast<std::size_t>(k) * sim.n_sym * sim.cb.m_points,
                static_cast<std::size_t>(sim.n_sym) * sim.cb.m_points};
    }

    void run_frame(std::uint64_t frame, double sigma2) {
        const SimConfig& cfg = sim.cfg;
        const int K = sim.cb.n_users;
        std::vector<std::vector<std::uint8_t>> payloads(K);
        std::vector<std::vector<int>> symbols(K);
        std::vector<std::vector<int>> pis(K);

        for (int k = 0; k < K; ++k) {
            auto gen = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::payload,
                                          static_cast<std::uint64_t>(k));
            payloads[k].resize(sim.payload);
            for (auto& b : payloads[k]) b = static_cast<std::uint8_t>(gen.next() & 1);
            if (cfg.scheme == Scheme::bipcm) {
                pis[k] = cfg.interleaver == InterleaverMode::identity
                             ? identity
                             : schemes::make_interleaver(
                                   cfg.n_code, schemes::interleaver_seed(cfg.master_seed, frame, k,
                                                                         cfg.interleaver));
                auto fr = schemes::bipcm_encode_frame(payloads[k], sim.specs[0], pis[k], sim.cb);
                symbols[k] = std::move(fr.symbol_indices);
            } else {
                auto fr = schemes::mlpc_encode_frame(payloads[k], sim.specs, sim.cb);
                symbols[k] = std::move(fr.symbol_indices);
            }
        }

        auto fading = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::fading);
        auto real = channel::draw_channel(cfg.channel_model, sim.n_sym, K, fading, cfg.block_len);
        real.sigma2 = sigma2;
        auto noise = rng::derive_stream(cfg.master_seed, frame, rng::StreamKind::noise);

        for (int t = 0; t < sim.n_sym; ++t) {
            for (int k = 0; k < K; ++k) scma::scma_modulate_into(k, symbols[k][t], sim.cb, x[k]);
            channel::apply_channel_into(x, real, t, noise, r);
            const auto post = det.detect(r, real.use(t), sigma2, ws);
            for (int k = 0; k < K; ++k) {
                const auto src = post.row(k);
                std::copy(src.begin(), src.end(),
                          posterior_rows(k).begin() + static_cast<std::size_t>(t) * sim.cb.m_points);
            }
        }

        bool any_error = false;
        for (int k = 0; k < K; ++k) {
            std::vector<std::uint8_t> decoded;
            if (cfg.scheme == Scheme::bipcm) {
                decoded = schemes::bipcm_decode_frame(posterior_rows(k), sim.specs[0], pis[k],
                                                      sim.cb, sim.list);
            } else {
                decoded = schemes::mlpc_decode_frame(posterior_rows(k), sim.specs, sim.cb, sim.list);
            }
            if (decoded != payloads[k]) {
                ++user_errors[k];
                any_error = true;
            }
        }
        ++frames;
        if (any_error) ++frame_errors;
    }
};

constexpr std::uint64_t kBatchFrames = 256;

}  // namespace

FerResult run_fer_experiment(const SimConfig& cfg) {
    PreparedSim sim(cfg);
    const int n_workers = resolve_threads(cfg.threads);

    FerResult result;
    for (double snr : cfg.snr_db) {
        const double sigma2 =
            channel::sigma2_from_snr_db(snr, cfg.rate.value(), sim.lm);
        const auto t0 = std::chrono::steady_clock::now();

        std::vector<FrameWorker> workers;
        workers.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) workers.emplace_back(sim);

        std::uint64_t done = 0;
        std::uint64_t errors = 0;
        while (done < cfg.max_frames && errors < cfg.min_frame_errors) {
            const std::uint64_t batch = std::min(kBatchFrames, cfg.max_frames - done);
            parallel_frames(done, done + batch, n_workers,
                            [&workers, sigma2](std::uint64_t f, int w) {
                                workers[w].run_frame(f, sigma2);
                            });
            done += batch;
            errors = 0;
            for (const auto& w : workers) errors += w.frame_errors;
        }

        FerPoint point;
        point.snr_db = snr;
        point.per_user_errors.assign(sim.cb.n_users, 0);
        for (const auto& w : workers) {
            point.frames += w.frames;
            point.frame_errors += w.frame_errors;
            for (int k = 0; k < sim.cb.n_users; ++k) point.per_user_errors[k] += w.user_errors[k];
        }
        point.fer = point.frames > 0
                        ? static_cast<double>(point.frame_errors) / static_cast<double>(point.frames)
                        : 0.0;
        point.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.points.push_back(std::move(point));
    }
    flag_non_monotone(result.points, result.warnings);
    return result;
}

void flag_non_monotone(std::vector<FerPoint>& points, std::vector<std::string>& warnings) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        const FerPoint& prev = points[i - 1];
        FerPoint& cur = points[i];
        if (cur.fer <= prev.fer || prev.frames == 0 || cur.frames == 0) continue;
        auto var = [](const FerPoint& p) {
            return p.fer * (1.0 - p.fer) / static_cast<double>(p.frames);
        };
        const double sigma = std::sqrt(var(prev) + var(cur));
        const double z = sigma > 0.0 ? (cur.fer - prev.fer) / sigma : 0.0;
        cur.non_monotone_flag = true;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "non-monotone FER between %.3g dB and %.3g dB (z=%.2f)", prev.snr_db,
                      cur.snr_db, z);
        warnings.emplace_back(buf);
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void emit_results(const std::vector<FerPoint>& points, const SimConfig& cfg,
                  const std::string& path) {
    if (points.empty()) throw std::invalid_argument("emit_results: no points");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write results file: " + path);
    out << "snr_db,frames,errors,fer,scheme,decoder,list,n_code,rate,channel,seed,user_errors,"
           "wall_s\n";
    for (const auto& p : points) {
        char fer[40], snr[40], wall[40];
        std::snprintf(fer, sizeof(fer), "%.9g", p.fer);
        std::snprintf(snr, sizeof(snr), "%.9g", p.snr_db);
        std::snprintf(wall, sizeof(wall), "%.3f", p.wall_s);
        out << snr << ',' << p.frames << ',' << p.frame_errors << ',' << fer << ','
            << to_string(cfg.scheme) << ',' << to_string(cfg.decoder) << ','
            << (cfg.decoder == DecoderKind::sc ? 1 : cfg.list_size) << ',' << cfg.n_code << ','
            << cfg.rate.str() << ','
            << (cfg.channel_model == channel::FadingModel::fast ? "fast" : "block") << ','
            << cfg.master_seed << ',';
        for (std::size_t k = 0; k < p.per_user_errors.size(); ++k) {
            if (k) out << '|';
            out << p.per_user_errors[k];
        }
        out << ',' << wall << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<FerPoint> parse_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty results file: " + path);
    std::vector<FerPoint> points;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cols = split(line, ',');
        if (cols.size() < 13) throw std::runtime_error("bad results row: " + line);
        FerPoint p;
        p.snr_db = std::stod(cols[0]);
        p.frames = std::stoull(cols[1]);
        p.frame_errors = std::stoull(cols[2]);
        p.fer = std::stod(cols[3]);
        for (const auto& tok : split(cols[11], '|'))
            if (!tok.empty()) p.per_user_errors.push_back(std::stoull(tok));
        p.wall_s = std::stod(cols[12]);
        points.push_back(std::move(p));
    }
    return points;
}

// ---------------------------------------------------------------------------
// Construction runner
// ---------------------------------------------------------------------------

void run_design(const SimConfig& cfg) {
    cfg.validate();
    if (cfg.codebook_path.empty()) throw ConfigError("codebook path not set");
    const auto cb = scma::load_codebook(cfg.codebook_path);
    const int lm = cb.bits_per_symbol;
    const std::size_t want = cfg.scheme == Scheme::bipcm ? 1 : static_cast<std::size_t>(lm);
    if (cfg.frozen_set_paths.size() != want)
        throw ConfigError("design: expected " + std::to_string(want) + " frozen-set path(s)");

    design::DesignConfig dc;
    dc.scheme = cfg.scheme;
    dc.chain = design::DesignChain::scma;
    dc.n_code = cfg.n_code;
    dc.rate = cfg.rate;
    dc.design_snr_db = cfg.design_snr_db;
    dc.codebook = &cb;
    dc.channel = cfg.channel_model;
    dc.block_len = cfg.block_len;
    dc.mpa_iters = cfg.mpa_iters;
    dc.interleaver = cfg.interleaver;
    dc.master_seed = cfg.master_seed;
    dc.threads = cfg.threads;

    const int k = cfg.k_info(lm);
    design::FirstErrorHistogram hist;
    if (cfg.design_frames > 0) {
        hist = design::simulate_first_errors(dc, cfg.design_frames);
    } else {
        design::AdaptiveBudget budget;
        budget.max_frames = cfg.design_max_frames;
        hist = design::simulate_until_separated(dc, k, budget);
    }
    auto specs = design::select_info_set(hist, k, cfg.scheme, lm);
    polar::FrozenSetMeta meta;
    meta.design_snr_db = cfg.design_snr_db;
    meta.scheme = to_string(cfg.scheme);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto spec = design::with_crc(specs[i], cfg.crc_len);
        polar::save_frozen_set(cfg.frozen_set_paths[i], spec, meta);
    }
}

}  // namespace scmapolar::harness
