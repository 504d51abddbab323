#include "scmapolar/polar.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace scmapolar::polar {
namespace {

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(int v) {
    int n = 0;
    while ((1 << n) < v) ++n;
    return n;
}

double clamp_llr(double v) {
    if (v > kLlrSaturation) return kLlrSaturation;
    if (v < -kLlrSaturation) return -kLlrSaturation;
    return v;
}

}  // namespace

void PolarCodeSpec::validate() const {
    if (n_code <= 0 || !is_pow2(static_cast<std::size_t>(n_code)))
        throw std::invalid_argument("n_code must be a positive power of two");
    if (crc_len != 0 && crc_len != 8 && crc_len != 16)
        throw std::invalid_argument("crc_len must be 0, 8 or 16");
    if (payload_len < 0 || static_cast<int>(info_set.size()) != payload_len + crc_len)
        throw std::invalid_argument("info_set size must equal payload_len + crc_len");
    int prev = -1;
    for (int idx : info_set) {
        if (idx <= prev || idx >= n_code)
            throw std::invalid_argument("info_set must be strictly ascending and < n_code");
        prev = idx;
    }
}

PolarCodeSpec PolarCodeSpec::all_info(int n_code) {
    PolarCodeSpec spec;
    spec.n_code = n_code;
    spec.payload_len = n_code;
    spec.info_set.resize(n_code);
    for (int i = 0; i < n_code; ++i) spec.info_set[i] = i;
    spec.validate();
    return spec;
}

std::uint32_t crc_polynomial(int crc_len) {
    switch (crc_len) {
        case 8: return 0x07;    // CRC-8
        case 16: return 0x1021; // CRC-16/CCITT
        default: throw std::invalid_argument("unsupported crc length");
    }
}

std::uint32_t crc_bits(std::span<const std::uint8_t> bits, int crc_len) {
    const std::uint32_t poly = crc_polynomial(crc_len);
    const std::uint32_t top = 1u << (crc_len - 1);
    const std::uint32_t mask = (crc_len == 32) ? 0xffffffffu : ((1u << crc_len) - 1);
    std::uint32_t reg = 0;
    for (std::uint8_t b : bits) {
        const std::uint32_t in = ((reg & top) != 0) ^ (b & 1);
        reg = (reg << 1) & mask;
        if (in) reg ^= poly;
    }
    return reg;
}

std::vector<std::uint8_t> polar_transform(std::span<const std::uint8_t> u) {
    if (!is_pow2(u.size())) throw std::invalid_argument("polar_transform: length not a power of two");
    std::vector<std::uint8_t> x(u.begin(), u.end());
    const std::size_t n = x.size();
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t blk = 0; blk < n; blk += 2 * h) {
            for (std::size_t j = blk; j < blk + h; ++j) x[j] ^= x[j + h];
        }
    }
    return x;
}

std::vector<std::uint8_t> polar_encode(std::span<const std::uint8_t> payload,
                                       const PolarCodeSpec& spec) {
    spec.validate();
    if (static_cast<int>(payload.size()) != spec.payload_len)
        throw std::invalid_argument("polar_encode: payload length mismatch");
    std::vector<std::uint8_t> u(spec.n_code, 0);
    for (int i = 0; i < spec.payload_len; ++i) u[spec.info_set[i]] = payload[i] & 1;
    if (spec.crc_len > 0) {
        const std::uint32_t crc = crc_bits(payload, spec.crc_len);
        for (int i = 0; i < spec.crc_len; ++i) {
            const int bit = (crc >> (spec.crc_len - 1 - i)) & 1;
            u[spec.info_set[spec.payload_len + i]] = static_cast<std::uint8_t>(bit);
        }
    }
    return polar_transform(u);
}

// ---------------------------------------------------------------------------
// SC decoder
// ---------------------------------------------------------------------------

ScDecoder::ScDecoder(PolarCodeSpec spec) : spec_(std::move(spec)), kt_(&kernels::active()) {
    spec_.validate();
    const int n = spec_.n_code;
    n_stages_ = log2_exact(n);
    stage_off_.resize(n_stages_ + 1);
    int off = 0;
    for (int d = 0; d <= n_stages_; ++d) {
        stage_off_[d] = off;
        off += n >> d;
    }
    llr_.resize(off);
    bits_.resize(off);
    u_.resize(n);
    frozen_.assign(n, 1);
    for (int idx : spec_.info_set) frozen_[idx] = 0;
}

void ScDecoder::run(std::span<const double> llrs) {
    if (static_cast<int>(llrs.size()) != spec_.n_code)
        throw std::invalid_argument("sc_decode: llr length mismatch");
    for (int i = 0; i < spec_.n_code; ++i) llr_[i] = clamp_llr(llrs[i]);
    rec(0, 0);
}

void ScDecoder::rec(int stage, int leaf_base) {
    const int size = spec_.n_code >> stage;
    if (size == 1) {
        const double lam = llr_[stage_off_[n_stages_]];
        std::uint8_t dec = frozen_[leaf_base] ? 0 : (lam < 0.0 ? 1 : 0);
        if (genie_ != nullptr) {
            err_[leaf_base] = (dec != genie_[leaf_base]) ? 1 : 0;
            dec = genie_[leaf_base];
        }
        u_[leaf_base] = dec;
        bits_[stage_off_[n_stages_]] = dec;
        return;
    }
    const int half = size >> 1;
    const double* in = llr_.data() + stage_off_[stage];
    double* out = llr_.data() + stage_off_[stage + 1];
    std::uint8_t* bs = bits_.data() + stage_off_[stage];
    const std::uint8_t* bc = bits_.data() + stage_off_[stage + 1];

    kt_->polar_f(in, in + half, out, static_cast<std::size_t>(half));
    rec(stage + 1, leaf_base);

    std::memcpy(bs, bc, static_cast<std::size_t>(half));
    kt_->polar_g(in, in + half, bs, out, static_cast<std::size_t>(half));
    rec(stage + 1, leaf_base + half);

    for (int i = 0; i < half; ++i) {
        const std::uint8_t right = bc[i];
        bs[i] = bs[i] ^ right;
        bs[i + half] = right;
    }
}

ScResult ScDecoder::decode(const LlrFrame& llrs) {
    genie_ = nullptr;
    err_ = nullptr;
    run(llrs.values);
    ScResult res;
    res.payload.resize(spec_.payload_len);
    for (int i = 0; i < spec_.payload_len; ++i) res.payload[i] = u_[spec_.info_set[i]];
    res.codeword.assign(bits_.begin(), bits_.begin() + spec_.n_code);
    return res;
}

void ScDecoder::decode_genie(std::span<const double> llrs, std::span<const std::uint8_t> true_u,
                             std::span<std::uint8_t> first_error) {
    if (static_cast<int>(true_u.size()) != spec_.n_code ||
        static_cast<int>(first_error.size()) != spec_.n_code)
        throw std::invalid_argument("decode_genie: span length mismatch");
    genie_ = true_u.data();
    err_ = first_error.data();
    run(llrs);
    genie_ = nullptr;
    err_ = nullptr;
}

// ---------------------------------------------------------------------------
// SCL decoder
// ---------------------------------------------------------------------------

SclDecoder::SclDecoder(PolarCodeSpec spec, int list_size)
    : spec_(std::move(spec)), list_size_(list_size), kt_(&kernels::active()) {
    spec_.validate();
    if (list_size_ < 1) throw std::invalid_argument("list_size must be >= 1");
    const int n = spec_.n_code;
    n_stages_ = log2_exact(n);
    stages_.resize(n_stages_ + 1);
    for (int d = 0; d <= n_stages_; ++d) {
        StagePool& pool = stages_[d];
        pool.size = n >> d;
        pool.llr.resize(static_cast<std::size_t>(list_size_) * pool.size);
        pool.bits.resize(static_cast<std::size_t>(list_size_) * pool.size);
        pool.ref.resize(list_size_);
        pool.of_path.resize(list_size_);
        pool.free_list.reserve(list_size_);
    }
    pm_.resize(list_size_);
    active_.resize(list_size_);
    free_paths_.reserve(list_size_);
    u_.resize(list_size_);
    for (auto& h : u_) h.resize(n);
    frozen_.assign(n, 1);
    for (int idx : spec_.info_set) frozen_[idx] = 0;
}

int SclDecoder::alloc_array(int stage) {
    StagePool& pool = stages_[stage];
    assert(!pool.free_list.empty());
    const int arr = pool.free_list.back();
    pool.free_list.pop_back();
    pool.ref[arr] = 1;
    return arr;
}

void SclDecoder::release_array(int stage, int arr) {
    StagePool& pool = stages_[stage];
    if (--pool.ref[arr] == 0) pool.free_list.push_back(arr);
}

void SclDecoder::make_unique(int stage, int path) {
    StagePool& pool = stages_[stage];
    const int arr = pool.of_path[path];
    if (pool.ref[arr] == 1) return;
    --pool.ref[arr];
    const int fresh = alloc_array(stage);
    std::memcpy(pool.llr.data() + static_cast<std::size_t>(fresh) * pool.size,
                pool.llr.data() + static_cast<std::size_t>(arr) * pool.size,
                sizeof(double) * pool.size);
    std::memcpy(pool.bits.data() + static_cast<std::size_t>(fresh) * pool.size,
                pool.bits.data() + static_cast<std::size_t>(arr) * pool.size,
                sizeof(std::uint8_t) * pool.size);
    pool.of_path[path] = fresh;
}

const double* SclDecoder::llr_r(int stage, int path) const {
    const StagePool& pool = stages_[stage];
    return pool.llr.data() + static_cast<std::size_t>(pool.of_path[path]) * pool.size;
}

double* SclDecoder::llr_w(int stage, int path) {
    make_unique(stage, path);
    StagePool& pool = stages_[stage];
    return pool.llr.data() + static_cast<std::size_t>(pool.of_path[path]) * pool.size;
}

const std::uint8_t* SclDecoder::bits_r(int stage, int path) const {
    const StagePool& pool = stages_[stage];
    return pool.bits.data() + static_cast<std::size_t>(pool.of_path[path]) * pool.size;
}

std::uint8_t* SclDecoder::bits_w(int stage, int path) {
    make_unique(stage, path);
    StagePool& pool = stages_[stage];
    return pool.bits.data() + static_cast<std::size_t>(pool.of_path[path]) * pool.size;
}

int SclDecoder::clone_path(int path) {
    assert(!free_paths_.empty());
    const int q = free_paths_.back();
    free_paths_.pop_back();
    active_[q] = 1;
    pm_[q] = pm_[path];
    std::memcpy(u_[q].data(), u_[path].data(), u_[path].size());
    for (int d = 0; d <= n_stages_; ++d) {
        stages_[d].of_path[q] = stages_[d].of_path[path];
        ++stages_[d].ref[stages_[d].of_path[q]];
    }
    return q;
}

void SclDecoder::kill_path(int path) {
    active_[path] = 0;
    free_paths_.push_back(path);
    for (int d = 0; d <= n_stages_; ++d) release_array(d, stages_[d].of_path[path]);
}

void SclDecoder::rec(int stage, int leaf_base) {
    const int size = spec_.n_code >> stage;
    if (size == 1) {
        leaf(leaf_base);
        return;
    }
    const int half = size >> 1;
    const std::size_t uhalf = static_cast<std::size_t>(half);

    for (int p = 0; p < list_size_; ++p) {
        if (!active_[p]) continue;
        const double* in = llr_r(stage, p);
        kt_->polar_f(in, in + half, llr_w(stage + 1, p), uhalf);
    }
    rec(stage + 1, leaf_base);

    for (int p = 0; p < list_size_; ++p) {
        if (!active_[p]) continue;
        std::uint8_t* bs = bits_w(stage, p);
        std::memcpy(bs, bits_r(stage + 1, p), uhalf);
        const double* in = llr_r(stage, p);
        kt_->polar_g(in, in + half, bs, llr_w(stage + 1, p), uhalf);
    }
    rec(stage + 1, leaf_base + half);

    for (int p = 0; p < list_size_; ++p) {
        if (!active_[p]) continue;
        const std::uint8_t* bc = bits_r(stage + 1, p);
        std::uint8_t* bs = bits_w(stage, p);
        for (int i = 0; i < half; ++i) {
            const std::uint8_t right = bc[i];
            bs[i] = bs[i] ^ right;
            bs[i + half] = right;
        }
    }
}

void SclDecoder::leaf(int phi) {
    if (frozen_[phi]) {
        for (int p = 0; p < list_size_; ++p) {
            if (!active_[p]) continue;
            const double lam = llr_r(n_stages_, p)[0];
            if (lam < 0.0) pm_[p] -= lam;
            bits_w(n_stages_, p)[0] = 0;
            u_[p][phi] = 0;
        }
    } else {
        struct Cand {
            double pm;
            int path;
            std::uint8_t bit;
        };
        std::vector<Cand> cands;
        cands.reserve(2 * static_cast<std::size_t>(list_size_));
        for (int p = 0; p < list_size_; ++p) {
            if (!active_[p]) continue;
            const double lam = llr_r(n_stages_, p)[0];
            const double pen0 = lam < 0.0 ? -lam : 0.0;
            const double pen1 = lam > 0.0 ? lam : 0.0;
            cands.push_back({pm_[p] + pen0, p, 0});
            cands.push_back({pm_[p] + pen1, p, 1});
        }
        const std::size_t keep = std::min<std::size_t>(cands.size(), list_size_);
        if (cands.size() > keep) {
            std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
                if (a.pm != b.pm) return a.pm < b.pm;
                if (a.path != b.path) return a.path < b.path;
                return a.bit < b.bit;
            });
        }
        std::vector<std::uint8_t> kept0(list_size_, 0), kept1(list_size_, 0);
        std::vector<double> pm0(list_size_, 0.0), pm1(list_size_, 0.0);
        for (std::size_t c = 0; c < keep; ++c) {
            if (cands[c].bit == 0) {
                kept0[cands[c].path] = 1;
                pm0[cands[c].path] = cands[c].pm;
            } else {
                kept1[cands[c].path] = 1;
                pm1[cands[c].path] = cands[c].pm;
            }
        }
        // Free dead paths first so clones always find a slot.
        for (int p = 0; p < list_size_; ++p) {
            if (active_[p] && !kept0[p] && !kept1[p]) kill_path(p);
        }
        for (int p = 0; p < list_size_; ++p) {
            if (!kept0[p] && !kept1[p]) continue;
            if (kept0[p] && kept1[p]) {
                const int q = clone_path(p);
                pm_[q] = pm1[p];
                u_[q][phi] = 1;
                bits_w(n_stages_, q)[0] = 1;
                pm_[p] = pm0[p];
                u_[p][phi] = 0;
                bits_w(n_stages_, p)[0] = 0;
            } else {
                const std::uint8_t bit = kept1[p] ? 1 : 0;
                pm_[p] = bit ? pm1[p] : pm0[p];
                u_[p][phi] = bit;
                bits_w(n_stages_, p)[0] = bit;
            }
        }
    }
    if (trace_ != nullptr) {
        double best = 0.0;
        bool first = true;
        for (int p = 0; p < list_size_; ++p) {
            if (!active_[p]) continue;
            if (first || pm_[p] < best) best = pm_[p];
            first = false;
        }
        trace_->push_back(best);
    }
}

SclResult SclDecoder::decode(const LlrFrame& llrs) {
    if (static_cast<int>(llrs.values.size()) != spec_.n_code)
        throw std::invalid_argument("scl_decode: llr length mismatch");

    for (int d = 0; d <= n_stages_; ++d) {
        StagePool& pool = stages_[d];
        pool.free_list.clear();
        for (int a = list_size_ - 1; a >= 0; --a) pool.free_list.push_back(a);
        std::fill(pool.ref.begin(), pool.ref.end(), 0);
        std::fill(pool.of_path.begin(), pool.of_path.end(), -1);
    }
    free_paths_.clear();
    for (int p = list_size_ - 1; p >= 1; --p) free_paths_.push_back(p);
    std::fill(active_.begin(), active_.end(), 0);
    active_[0] = 1;
    pm_[0] = 0.0;
    for (int d = 0; d <= n_stages_; ++d) stages_[d].of_path[0] = alloc_array(d);
    double* ch = stages_[0].llr.data() + static_cast<std::size_t>(stages_[0].of_path[0]) * spec_.n_code;
    for (int i = 0; i < spec_.n_code; ++i) ch[i] = clamp_llr(llrs.values[i]);

    rec(0, 0);

    std::vector<int> order;
    for (int p = 0; p < list_size_; ++p)
        if (active_[p]) order.push_back(p);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pm_[a] != pm_[b]) return pm_[a] < pm_[b];
        return a < b;
    });

    auto extract_payload = [&](int p) {
        std::vector<std::uint8_t> payload(spec_.payload_len);
        for (int i = 0; i < spec_.payload_len; ++i) payload[i] = u_[p][spec_.info_set[i]];
        return payload;
    };
    auto crc_passes = [&](int p, std::span<const std::uint8_t> payload) {
        if (spec_.crc_len == 0) return false;
        const std::uint32_t crc = crc_bits(payload, spec_.crc_len);
        for (int i = 0; i < spec_.crc_len; ++i) {
            const std::uint8_t want = (crc >> (spec_.crc_len - 1 - i)) & 1;
            if (u_[p][spec_.info_set[spec_.payload_len + i]] != want) return false;
        }
        return true;
    };

    int winner = order.front();
    bool crc_ok = false;
    if (spec_.crc_len > 0) {
        for (int p : order) {
            const auto payload = extract_payload(p);
            if (crc_passes(p, payload)) {
                winner = p;
                crc_ok = true;
                break;
            }
        }
    }

    SclResult res;
    res.payload = extract_payload(winner);
    const std::uint8_t* cw = bits_r(0, winner);
    res.codeword.assign(cw, cw + spec_.n_code);
    res.path_metric = pm_[winner];
    res.crc_ok = crc_ok;
    return res;
}

// ---------------------------------------------------------------------------
// Frozen-set file
// ---------------------------------------------------------------------------

void save_frozen_set(const std::string& path, const PolarCodeSpec& spec,
                     const FrozenSetMeta& meta) {
    spec.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write frozen-set file: " + path);
    std::ostringstream snr;
    snr << meta.design_snr_db;
    out << "n_code=" << spec.n_code << "\n";
    out << "payload_len=" << spec.payload_len << "\n";
    out << "crc_len=" << spec.crc_len << "\n";
    out << "design_snr_db=" << snr.str() << "\n";
    out << "scheme=" << meta.scheme << "\n";
    char poly[16];
    std::snprintf(poly, sizeof(poly), "0x%04x", spec.crc_len > 0 ? crc_polynomial(spec.crc_len) : 0);
    out << "crc_poly=" << poly << "\n";
    for (int idx : spec.info_set) out << idx << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<PolarCodeSpec, FrozenSetMeta> load_frozen_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open frozen-set file: " + path);
    PolarCodeSpec spec;
    FrozenSetMeta meta;
    std::string line;
    auto header_value = [](const std::string& l, const char* key) -> const char* {
        const std::size_t klen = std::strlen(key);
        if (l.compare(0, klen, key) == 0) return l.c_str() + klen;
        return nullptr;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (const char* v = header_value(line, "n_code=")) {
            spec.n_code = std::stoi(v);
        } else if (const char* v2 = header_value(line, "payload_len=")) {
            spec.payload_len = std::stoi(v2);
        } else if (const char* v3 = header_value(line, "crc_len=")) {
            spec.crc_len = std::stoi(v3);
        } else if (const char* v4 = header_value(line, "design_snr_db=")) {
            meta.design_snr_db = std::stod(v4);
        } else if (const char* v5 = header_value(line, "scheme=")) {
            meta.scheme = v5;
        } else if (header_value(line, "crc_poly=")) {
            // informational; the polynomial is fixed by crc_len
        } else {
            spec.info_set.push_back(std::stoi(line));
        }
    }
    spec.validate();
    return {spec, meta};
}

}  // namespace scmapolar::polar
