#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "scmapolar/rng.hpp"
#include "scmapolar/schemes.hpp"

using namespace scmapolar;
using Bits = std::vector<std::uint8_t>;

namespace {

const std::string kDefaultCodebook = std::string(SCMAPOLAR_DATA_DIR) + "/codebook_k6n4m4.txt";

polar::PolarCodeSpec all_info(int n) { return polar::PolarCodeSpec::all_info(n); }

Bits random_bits(rng::Xoshiro256pp& gen, int n) {
    Bits b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(gen.next() & 1);
    return b;
}

std::vector<double> random_posterior(rng::Xoshiro256pp& gen, int m, double floor = 0.01) {
    std::vector<double> p(m);
    double sum = 0.0;
    for (auto& v : p) {
        v = floor + gen.uniform01();
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return p;
}

// point mass posteriors for a transmitted index sequence
std::vector<double> point_mass(const std::vector<int>& symbols, int m) {
    std::vector<double> p(symbols.size() * m, 0.0);
    for (std::size_t t = 0; t < symbols.size(); ++t) p[t * m + symbols[t]] = 1.0;
    return p;
}

}  // namespace

TEST_CASE("interleaver and its inverse compose to identity for every seed") {
    rng::Xoshiro256pp gen(51);
    for (int it = 0; it < 100; ++it) {
        const int n = 2 + static_cast<int>(gen.uniform_below(700));
        const auto pi = schemes::make_interleaver(n, gen.next());
        const auto inv = schemes::invert_permutation(pi);
        std::vector<int> seen(n, 0);
        for (int v : pi) ++seen[v];
        for (int c : seen) CHECK(c == 1);
        for (int i = 0; i < n; ++i) {
            CHECK(inv[pi[i]] == i);
            CHECK(pi[inv[i]] == i);
        }
    }
}

TEST_CASE("bipcm zero payload maps every symbol to the all-zero label") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    const auto spec = all_info(32);
    const auto pi = schemes::identity_permutation(32);
    const auto frame = schemes::bipcm_encode_frame(Bits(32, 0), spec, pi, cb);
    for (int idx : frame.symbol_indices) CHECK(idx == cb.gray_label_to_index[0]);
}

TEST_CASE("bipcm with identity interleaver chunks consecutive bit pairs") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    const auto spec = all_info(16);
    const auto pi = schemes::identity_permutation(16);
    rng::Xoshiro256pp gen(52);
    const auto payload = random_bits(gen, 16);
    const auto frame = schemes::bipcm_encode_frame(payload, spec, pi, cb);
    for (int t = 0; t < 8; ++t) {
        const int label = (frame.codeword[2 * t] << 1) | frame.codeword[2 * t + 1];
        CHECK(frame.symbol_indices[t] == cb.gray_label_to_index[label]);
    }
}

TEST_CASE("bit llrs follow the marginalization formula") {
    const std::vector<int> perm{0, 1, 3, 2};  // labels 00,01,11,10 on indices 0..3

    SUBCASE("uniform posterior gives zero llrs") {
        const std::vector<double> post{0.25, 0.25, 0.25, 0.25};
        const auto llrs = schemes::bit_llrs_from_posterior(post, perm, 2);
        CHECK(llrs[0] == doctest::Approx(0.0));
        CHECK(llrs[1] == doctest::Approx(0.0));
    }

    SUBCASE("worked example") {
        const std::vector<double> post{0.5, 0.25, 0.125, 0.125};
        const auto llrs = schemes::bit_llrs_from_posterior(post, perm, 2);
        CHECK(llrs[0] == doctest::Approx(std::log(3.0)).epsilon(1e-12));
        CHECK(llrs[1] == doctest::Approx(std::log(0.625 / 0.375)).epsilon(1e-12));
    }

    SUBCASE("point mass saturates both bits toward its label") {
        const std::vector<double> post{0.0, 0.0, 0.0, 1.0};  // index 3 = label 10
        const auto llrs = schemes::bit_llrs_from_posterior(post, perm, 2);
        CHECK(llrs[0] == -kLlrSaturation);  // bit1 = 1
        CHECK(llrs[1] == kLlrSaturation);   // bit2 = 0
    }

    SUBCASE("marginals against a direct-summation oracle") {
        rng::Xoshiro256pp gen(53);
        for (int it = 0; it < 1000; ++it) {
            const auto post = random_posterior(gen, 4);
            const auto llrs = schemes::bit_llrs_from_posterior(post, perm, 2);
            for (int m = 0; m < 2; ++m) {
                double p0 = 0.0, p1 = 0.0;
                for (int label = 0; label < 4; ++label) {
                    const int bit = (label >> (1 - m)) & 1;
                    (bit ? p1 : p0) += post[perm[label]];
                }
                CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(llrs[m] == doctest::Approx(std::log(p0 / p1)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("bipcm decode round-trips point-mass posteriors") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    rng::Xoshiro256pp gen(54);
    polar::PolarCodeSpec spec;
    spec.n_code = 64;
    for (int i = 24; i < 64; ++i) spec.info_set.push_back(i);
    spec.payload_len = 40;
    for (int it = 0; it < 200; ++it) {
        const auto payload = random_bits(gen, spec.payload_len);
        const auto pi = schemes::make_interleaver(64, gen.next());
        const auto frame = schemes::bipcm_encode_frame(payload, spec, pi, cb);
        const auto post = point_mass(frame.symbol_indices, cb.m_points);
        CHECK(schemes::bipcm_decode_frame(post, spec, pi, cb, 1) == payload);
    }
}

TEST_CASE("bipcm decode with list 1 equals plain sc on the same llrs") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    rng::Xoshiro256pp gen(55);
    polar::PolarCodeSpec spec;
    spec.n_code = 32;
    for (int i = 10; i < 32; ++i) spec.info_set.push_back(i);
    spec.payload_len = 22;
    const auto pi = schemes::make_interleaver(32, 99);
    for (int it = 0; it < 100; ++it) {
        std::vector<double> post(16 * 4);
        for (int t = 0; t < 16; ++t) {
            const auto row = random_posterior(gen, 4);
            std::copy(row.begin(), row.end(), post.begin() + t * 4);
        }
        const auto via_scheme = schemes::bipcm_decode_frame(post, spec, pi, cb, 1);

        polar::LlrFrame llrs;
        llrs.values.resize(32);
        for (int t = 0; t < 16; ++t) {
            const auto bl = schemes::bit_llrs_from_posterior(
                {post.data() + t * 4, 4}, cb.gray_label_to_index, 2);
            llrs.values[pi[2 * t]] = bl[0];
            llrs.values[pi[2 * t + 1]] = bl[1];
        }
        polar::ScDecoder sc(spec);
        CHECK(via_scheme == sc.decode(llrs).payload);
    }
}

TEST_CASE("mlpc zero payload maps to the all-zero set-partition label") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    std::vector<polar::PolarCodeSpec> specs{all_info(8), all_info(8)};
    const auto frame = schemes::mlpc_encode_frame(Bits(16, 0), specs, cb);
    for (int idx : frame.symbol_indices) CHECK(idx == cb.sp_label_to_index[0]);
}

TEST_CASE("mlpc with a rate-0 second level keeps the second label bit at zero") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    polar::PolarCodeSpec lvl2;
    lvl2.n_code = 8;
    lvl2.payload_len = 0;  // everything frozen
    std::vector<polar::PolarCodeSpec> specs{all_info(8), lvl2};
    rng::Xoshiro256pp gen(56);
    const auto payload = random_bits(gen, 8);
    const auto frame = schemes::mlpc_encode_frame(payload, specs, cb);
    const auto inv = schemes::invert_permutation(cb.sp_label_to_index);
    for (int idx : frame.symbol_indices) CHECK((inv[idx] & 1) == 0);
}

TEST_CASE("mlpc level llr follows the conditional formula") {
    const std::vector<int> identity{0, 1, 2, 3};  // labels (b1,b2) in order onto indices

    SUBCASE("uniform posterior gives zero first-level llr") {
        const std::vector<double> post{0.25, 0.25, 0.25, 0.25};
        CHECK(schemes::mlpc_level_llr(post, identity, 2, 0, {}) == doctest::Approx(0.0));
    }

    SUBCASE("worked example") {
        const std::vector<double> post{0.5, 0.25, 0.125, 0.125};
        CHECK(schemes::mlpc_level_llr(post, identity, 2, 0, {}) ==
              doctest::Approx(std::log(3.0)).epsilon(1e-12));
        const Bits known{0};
        CHECK(schemes::mlpc_level_llr(post, identity, 2, 1, known) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }

    SUBCASE("zero prefix probability is uninformative and flagged") {
        const std::vector<double> post{0.0, 0.0, 0.5, 0.5};
        const Bits known{0};  // P(b1=0) = 0
        schemes::LlrConversionStats stats;
        CHECK(schemes::mlpc_level_llr(post, identity, 2, 1, known, &stats) == 0.0);
        CHECK(stats.zero_prefix_events == 1);
    }
}

TEST_CASE("conditional level probabilities multiply back to the joint") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    const auto& sp = cb.sp_label_to_index;
    rng::Xoshiro256pp gen(57);
    for (int it = 0; it < 1000; ++it) {
        const auto post = random_posterior(gen, 4);
        for (int label = 0; label < 4; ++label) {
            const Bits bits{static_cast<std::uint8_t>((label >> 1) & 1),
                            static_cast<std::uint8_t>(label & 1)};
            double prod = 1.0;
            for (int m = 0; m < 2; ++m) {
                const double lam = schemes::mlpc_level_llr(
                    post, sp, 2, m, {bits.data(), static_cast<std::size_t>(m)});
                const double p0 = 1.0 / (1.0 + std::exp(-lam));
                prod *= bits[m] == 0 ? p0 : 1.0 - p0;
            }
            CHECK(prod == doctest::Approx(post[sp[label]]).epsilon(1e-9));
        }
    }
}

TEST_CASE("mlpc decode round-trips point-mass posteriors") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    rng::Xoshiro256pp gen(58);
    polar::PolarCodeSpec lvl;
    lvl.n_code = 32;
    for (int i = 12; i < 32; ++i) lvl.info_set.push_back(i);
    lvl.payload_len = 20;
    std::vector<polar::PolarCodeSpec> specs{lvl, lvl};
    for (int it = 0; it < 200; ++it) {
        const auto payload = random_bits(gen, 40);
        const auto frame = schemes::mlpc_encode_frame(payload, specs, cb);
        const auto post = point_mass(frame.symbol_indices, cb.m_points);
        CHECK(schemes::mlpc_decode_frame(post, specs, cb, 1) == payload);
    }
}

TEST_CASE("mlpc second level conditions on decoded bits, not true ones") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    std::vector<polar::PolarCodeSpec> specs{all_info(8), all_info(8)};
    rng::Xoshiro256pp gen(59);
    const auto payload = random_bits(gen, 16);
    const auto frame = schemes::mlpc_encode_frame(payload, specs, cb);
    auto post = point_mass(frame.symbol_indices, cb.m_points);

    // corrupt symbol 3: point mass on a label with the first bit flipped
    const auto inv = schemes::invert_permutation(cb.sp_label_to_index);
    const int true_label = inv[frame.symbol_indices[3]];
    const int flipped = true_label ^ 0b10;
    for (int c = 0; c < 4; ++c) post[3 * 4 + c] = 0.0;
    post[3 * 4 + cb.sp_label_to_index[flipped]] = 1.0;

    schemes::MlpcDecodeDiag diag;
    schemes::mlpc_decode_frame(post, specs, cb, 1, nullptr, &diag);

    // reproduce level-1 decoding to learn the decoded (wrong at t=3) codeword
    polar::LlrFrame l1;
    for (int t = 0; t < 8; ++t)
        l1.values.push_back(
            schemes::mlpc_level_llr({post.data() + t * 4, 4}, cb.sp_label_to_index, 2, 0, {}));
    polar::ScDecoder dec(specs[0]);
    const auto cw1_hat = dec.decode(l1).codeword;
    CHECK(cw1_hat[3] != frame.level_codewords[0][3]);

    for (int t = 0; t < 8; ++t) {
        const Bits known{cw1_hat[t]};
        const double expect = schemes::mlpc_level_llr({post.data() + t * 4, 4},
                                                      cb.sp_label_to_index, 2, 1, known);
        CHECK(diag.level_llrs[1][t] == expect);
    }
}

TEST_CASE("llr conversion work matches the claimed summation counts") {
    const auto cb = scma::load_codebook(kDefaultCodebook);
    rng::Xoshiro256pp gen(60);
    const int n_code = 64;
    std::vector<double> post(32 * 4);
    for (int t = 0; t < 32; ++t) {
        const auto row = random_posterior(gen, 4);
        std::copy(row.begin(), row.end(), post.begin() + t * 4);
    }

    schemes::LlrConversionStats bipcm_stats;
    polar::PolarCodeSpec spec;
    spec.n_code = n_code;
    for (int i = 32; i < 64; ++i) spec.info_set.push_back(i);
    spec.payload_len = 32;
    const auto pi = schemes::identity_permutation(n_code);
    schemes::bipcm_decode_frame(post, spec, pi, cb, 1, &bipcm_stats);
    CHECK(bipcm_stats.marginal_sums == static_cast<std::uint64_t>(n_code));

    schemes::LlrConversionStats mlpc_stats;
    polar::PolarCodeSpec lvl;
    lvl.n_code = 32;
    for (int i = 16; i < 32; ++i) lvl.info_set.push_back(i);
    lvl.payload_len = 16;
    std::vector<polar::PolarCodeSpec> specs{lvl, lvl};
    schemes::mlpc_decode_frame(post, specs, cb, 1, &mlpc_stats);
    CHECK(mlpc_stats.marginal_sums <= static_cast<std::uint64_t>(2 * n_code / 2));
}
