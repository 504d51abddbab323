#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "scmapolar/channel.hpp"
#include "scmapolar/rng.hpp"

using namespace scmapolar;
using channel::cplx;
using channel::FadingModel;

TEST_CASE("block fading holds coefficients within a block and redraw at the boundary") {
    auto gen = rng::derive_stream(7, 0, rng::StreamKind::fading);
    const auto real = channel::draw_channel(FadingModel::block, 40, 3, gen, 18);
    for (int k = 0; k < 3; ++k) {
        for (int t = 1; t < 18; ++t) CHECK(real.coeff(t, k) == real.coeff(0, k));
        CHECK(real.coeff(18, k) != real.coeff(17, k));
        for (int t = 19; t < 36; ++t) CHECK(real.coeff(t, k) == real.coeff(18, k));
    }
}

TEST_CASE("fast fading equals block fading with unit block length") {
    auto g1 = rng::derive_stream(8, 3, rng::StreamKind::fading);
    auto g2 = rng::derive_stream(8, 3, rng::StreamKind::fading);
    const auto fast = channel::draw_channel(FadingModel::fast, 30, 4, g1, 18);
    const auto unit = channel::draw_channel(FadingModel::block, 30, 4, g2, 1);
    CHECK(fast.h == unit.h);
}

TEST_CASE("fading coefficients have unit mean-square magnitude") {
    auto gen = rng::derive_stream(9, 0, rng::StreamKind::fading);
    const auto real = channel::draw_channel(FadingModel::fast, 250000, 4, gen);
    double acc = 0.0;
    for (const auto& v : real.h) acc += std::norm(v);
    acc /= static_cast<double>(real.h.size());
    CHECK(acc == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("apply_channel reduces to superposition without noise") {
    channel::ChannelRealization real;
    real.n_users = 3;
    real.n_uses = 1;
    real.sigma2 = 0.0;
    real.h.assign(3, cplx{1.0, 0.0});
    std::vector<std::vector<cplx>> x{
        {{1.0, 0.0}, {0.0, 0.0}},
        {{0.0, 2.0}, {1.0, 0.0}},
        {{0.0, 0.0}, {0.5, -0.5}},
    };
    auto noise = rng::derive_stream(1, 0, rng::StreamKind::noise);
    const auto r = channel::apply_channel(x, real, 0, noise);
    CHECK(r[0] == cplx{1.0, 2.0});
    CHECK(r[1] == cplx{1.5, -0.5});
}

TEST_CASE("single active user sees its own faded codeword") {
    channel::ChannelRealization real;
    real.n_users = 1;
    real.n_uses = 1;
    real.sigma2 = 0.0;
    real.h = {cplx{0.3, -1.2}};
    std::vector<std::vector<cplx>> x{{{1.0, 1.0}, {2.0, 0.0}}};
    auto noise = rng::derive_stream(1, 0, rng::StreamKind::noise);
    const auto r = channel::apply_channel(x, real, 0, noise);
    CHECK(std::abs(r[0] - real.h[0] * x[0][0]) < 1e-15);
    CHECK(std::abs(r[1] - real.h[0] * x[0][1]) < 1e-15);
}

TEST_CASE("noise-only output has per-component variance sigma2") {
    channel::ChannelRealization real;
    real.n_users = 1;
    real.n_uses = 1;
    real.sigma2 = 0.37;
    real.h = {cplx{}};
    std::vector<std::vector<cplx>> x{{cplx{}, cplx{}, cplx{}, cplx{}}};
    auto noise = rng::derive_stream(2, 0, rng::StreamKind::noise);
    double acc = 0.0;
    const int reps = 100000;
    std::vector<cplx> r(4);
    for (int i = 0; i < reps; ++i) {
        channel::apply_channel_into(x, real, 0, noise, r);
        for (const auto& v : r) acc += std::norm(v);
    }
    acc /= static_cast<double>(reps) * 4;
    CHECK(acc == doctest::Approx(real.sigma2).epsilon(0.01));
}

TEST_CASE("channel application is linear in the codewords") {
    auto gen = rng::derive_stream(10, 0, rng::StreamKind::fading);
    channel::ChannelRealization real = channel::draw_channel(FadingModel::fast, 1, 2, gen);
    real.sigma2 = 0.0;
    std::vector<std::vector<cplx>> xa{{{1.0, 0.5}, {0.0, 0.0}}, {{0.0, 1.0}, {1.0, 0.0}}};
    std::vector<std::vector<cplx>> xb{{{0.5, 0.0}, {1.0, 1.0}}, {{1.0, 0.0}, {0.0, 2.0}}};
    std::vector<std::vector<cplx>> sum = xa;
    for (int k = 0; k < 2; ++k)
        for (int n = 0; n < 2; ++n) sum[k][n] += xb[k][n];
    auto noise = rng::derive_stream(1, 0, rng::StreamKind::noise);
    const auto ra = channel::apply_channel(xa, real, 0, noise);
    const auto rb = channel::apply_channel(xb, real, 0, noise);
    const auto rs = channel::apply_channel(sum, real, 0, noise);
    for (int n = 0; n < 2; ++n) CHECK(std::abs(rs[n] - (ra[n] + rb[n])) < 1e-12);
}

TEST_CASE("identical stream derivation reproduces the channel exactly") {
    auto g1 = rng::derive_stream(77, 5, rng::StreamKind::fading);
    auto g2 = rng::derive_stream(77, 5, rng::StreamKind::fading);
    const auto a = channel::draw_channel(FadingModel::block, 100, 6, g1);
    const auto b = channel::draw_channel(FadingModel::block, 100, 6, g2);
    CHECK(a.h == b.h);
}

TEST_CASE("snr calibration follows the energy-per-message-bit rule") {
    CHECK(channel::sigma2_from_snr_db(0.0, 0.5, 2) == doctest::Approx(1.0));
    CHECK(channel::sigma2_from_snr_db(10.0, 0.5, 2) == doctest::Approx(0.1));
    // doubling the rate halves Emb and sigma2 at fixed dB
    const double lo = channel::sigma2_from_snr_db(6.0, 1.0 / 3.0, 2);
    const double hi = channel::sigma2_from_snr_db(6.0, 2.0 / 3.0, 2);
    CHECK(lo == doctest::Approx(2.0 * hi).epsilon(1e-12));
    CHECK_THROWS_AS(channel::sigma2_from_snr_db(0.0, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(channel::sigma2_from_snr_db(0.0, 0.5, 0), std::invalid_argument);
    CHECK_THROWS_AS(channel::sigma2_from_snr_db(0.0, 0.5, 2, -1.0), std::invalid_argument);
}
