#include <cmath>
#include <complex>
#include <ostream>
#include <vector>

#include "scmapolar/channel.hpp"
#include "scmapolar/harness.hpp"
#include "scmapolar/kernels.hpp"
#include "scmapolar/mpa.hpp"
#include "scmapolar/polar.hpp"
#include "scmapolar/rng.hpp"
#include "scmapolar/schemes.hpp"

namespace scmapolar::harness {
namespace {

using scma::cplx;

struct Checker {
    std::ostream& log;
    bool all_ok = true;

    void report(const char* name, bool ok) {
        log << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
        all_ok = all_ok && ok;
    }
};

bool check_kernel_equivalence(int rounds) {
    const auto& ref = kernels::scalar();
    const auto& act = kernels::active();
    rng::Xoshiro256pp gen(0x5eed);
    for (int it = 0; it < rounds; ++it) {
        const std::size_t n = 1 + gen.uniform_below(96);
        std::vector<double> a(n), b(n), o1(n), o2(n);
        std::vector<std::uint8_t> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = (gen.uniform01() - 0.5) * 80.0;
            b[i] = (gen.uniform01() - 0.5) * 80.0;
            s[i] = static_cast<std::uint8_t>(gen.next() & 1);
        }
        ref.polar_f(a.data(), b.data(), o1.data(), n);
        act.polar_f(a.data(), b.data(), o2.data(), n);
        if (o1 != o2) return false;
        ref.polar_g(a.data(), b.data(), s.data(), o1.data(), n);
        act.polar_g(a.data(), b.data(), s.data(), o2.data(), n);
        if (o1 != o2) return false;

        double table[64], wa[4], wb[4], r1[4], r2[4];
        for (double& v : table) v = gen.uniform01();
        for (int i = 0; i < 4; ++i) wa[i] = gen.uniform01();
        for (int i = 0; i < 4; ++i) wb[i] = gen.uniform01();
        ref.mpa_res_update_m4(table, wa, wb, r1);
        act.mpa_res_update_m4(table, wa, wb, r2);
        for (int i = 0; i < 4; ++i) {
            const double tol = 1e-12 * std::max(std::abs(r1[i]), 1.0);
            if (std::abs(r1[i] - r2[i]) > tol) return false;
        }
    }
    return true;
}

bool check_transform_involution(int rounds) {
    rng::Xoshiro256pp gen(0x7ab);
    for (int it = 0; it < rounds; ++it) {
        const int n = 1 << (1 + gen.uniform_below(7));
        std::vector<std::uint8_t> u(n);
        for (auto& b : u) b = static_cast<std::uint8_t>(gen.next() & 1);
        const auto x = polar::polar_transform(u);
        if (polar::polar_transform(x) != u) return false;
    }
    return true;
}

bool check_round_trip(int rounds) {
    polar::PolarCodeSpec spec;
    spec.n_code = 64;
    for (int i = 32; i < 64; ++i) spec.info_set.push_back(i);
    spec.payload_len = 32;
    polar::ScDecoder dec(spec);
    rng::Xoshiro256pp gen(0x90d);
    for (int it = 0; it < rounds; ++it) {
        std::vector<std::uint8_t> payload(spec.payload_len);
        for (auto& b : payload) b = static_cast<std::uint8_t>(gen.next() & 1);
        const auto cw = polar::polar_encode(payload, spec);
        polar::LlrFrame llrs;
        for (std::uint8_t bit : cw) llrs.values.push_back(bit ? -20.0 : 20.0);
        if (dec.decode(llrs).payload != payload) return false;
    }
    return true;
}

bool check_scl_matches_sc(int rounds) {
    polar::PolarCodeSpec spec;
    spec.n_code = 64;
    for (int i = 0; i < 64; i += 2) spec.info_set.push_back(i + 1);
    spec.payload_len = 32;
    polar::ScDecoder sc(spec);
    polar::SclDecoder scl(spec, 1);
    rng::Xoshiro256pp gen(0xba5e);
    for (int it = 0; it < rounds; ++it) {
        polar::LlrFrame llrs;
        for (int i = 0; i < 64; ++i) llrs.values.push_back((gen.uniform01() - 0.5) * 20.0);
        if (sc.decode(llrs).payload != scl.decode(llrs).payload) return false;
    }
    return true;
}

bool check_mpa_brute_force(const scma::ScmaCodebook& cb, int rounds) {
    mpa::MpaDetector det(&cb, 3);
    rng::Xoshiro256pp gen(0xfeed);
    const int m = cb.m_points;
    for (int it = 0; it < rounds; ++it) {
        const int n = static_cast<int>(gen.uniform_below(cb.n_resources));
        const auto& users = cb.resource_users[n];
        const int deg = static_cast<int>(users.size());
        const cplx r_n{gen.gaussian(), gen.gaussian()};
        std::vector<cplx> h(cb.n_users);
        for (auto& v : h) v = {gen.gaussian(), gen.gaussian()};
        const double sigma2 = 0.1 + gen.uniform01();
        std::vector<double> incoming(static_cast<std::size_t>(deg) * m);
        for (int j = 0; j < deg; ++j) {
            double sum = 0.0;
            for (int c = 0; c < m; ++c) {
                incoming[j * m + c] = 0.05 + gen.uniform01();
                sum += incoming[j * m + c];
            }
            for (int c = 0; c < m; ++c) incoming[j * m + c] /= sum;
        }
        for (int pos = 0; pos < deg; ++pos) {
            const int k = users[pos];
            const auto msg = det.resource_message(n, k, r_n, h, sigma2, incoming);
            for (int i = 0; i < m; ++i) {
                // brute force over all partner combinations
                double want = 0.0;
                std::vector<int> combo(deg, 0);
                combo[pos] = i;
                const int partners = deg - 1;
                for (int e = 0; e < 1 << (2 * partners); ++e) {
                    int v = e;
                    double w = 1.0;
                    for (int j = 0; j < deg; ++j) {
                        if (j == pos) continue;
                        combo[j] = v & 3;
                        v >>= 2;
                        w *= incoming[j * m + combo[j]];
                    }
                    want += mpa::channel_likelihood(r_n, combo, n, cb, h, sigma2) * w;
                }
                const double tol = 1e-12 * std::max(std::abs(want), std::abs(msg[i])) + 1e-300;
                if (std::abs(want - msg[i]) > tol) return false;
            }
        }
    }
    return true;
}

bool check_interleaver(int rounds) {
    rng::Xoshiro256pp gen(0x1eaf);
    for (int it = 0; it < rounds; ++it) {
        const int n = 2 + static_cast<int>(gen.uniform_below(512));
        const auto pi = schemes::make_interleaver(n, gen.next());
        const auto inv = schemes::invert_permutation(pi);
        for (int i = 0; i < n; ++i)
            if (pi[inv[i]] != i) return false;
    }
    return true;
}

bool check_codebook(const scma::ScmaCodebook& cb) {
    for (int k = 0; k < cb.n_users; ++k) {
        double energy = 0.0;
        for (int n : cb.user_resources[k])
            for (int c = 0; c < cb.m_points; ++c) energy += std::norm(cb.point(n, k, c));
        energy /= cb.m_points;
        if (std::abs(energy - 1.0) > 1e-12) return false;
    }
    return true;
}

bool check_channel_moments(std::uint64_t draws) {
    auto gen = rng::derive_stream(99, 0, rng::StreamKind::fading);
    double h2 = 0.0;
    const int users = 4;
    const std::uint64_t uses = draws / users;
    auto real = channel::draw_channel(channel::FadingModel::fast, static_cast<int>(uses), users, gen);
    for (const auto& v : real.h) h2 += std::norm(v);
    h2 /= static_cast<double>(real.h.size());
    return std::abs(h2 - 1.0) < 0.01;
}

}  // namespace

bool run_validate(bool quick, const std::string& codebook_path, std::ostream& log) {
    Checker chk{log};
    const int scale = quick ? 1 : 10;

    chk.report("kernel equivalence (scalar vs active)", check_kernel_equivalence(200 * scale));
    chk.report("polar transform involution", check_transform_involution(100 * scale));
    chk.report("polar encode/decode round trip", check_round_trip(100 * scale));
    chk.report("scl(list=1) matches sc", check_scl_matches_sc(100 * scale));
    chk.report("interleaver inverts", check_interleaver(50 * scale));
    chk.report("channel fading moment", check_channel_moments(quick ? 100000 : 1000000));

    try {
        const auto cb = scma::load_codebook(codebook_path);
        chk.report("codebook invariants", check_codebook(cb));
        chk.report("mpa message vs brute force", check_mpa_brute_force(cb, 20 * scale));
    } catch (const std::exception& e) {
        log << "[FAIL] codebook: " << e.what() << "\n";
        chk.all_ok = false;
    }
    return chk.all_ok;
}

}  // namespace scmapolar::harness
