#include "scmapolar/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace scmapolar::channel {

ChannelRealization draw_channel(FadingModel model, int n_uses, int n_users,
                                rng::Xoshiro256pp& gen, int block_len) {
    if (n_uses < 1 || n_users < 1) throw std::invalid_argument("draw_channel: empty dimensions");
    if (block_len < 1) throw std::invalid_argument("draw_channel: block_len must be >= 1");
    const int effective_block = model == FadingModel::fast ? 1 : block_len;

    ChannelRealization real;
    real.n_users = n_users;
    real.n_uses = n_uses;
    real.h.resize(static_cast<std::size_t>(n_uses) * n_users);
    constexpr double kHalf = 0.70710678118654752440;  // sqrt(1/2)
    for (int t = 0; t < n_uses; ++t) {
        for (int k = 0; k < n_users; ++k) {
            if (t % effective_block == 0) {
                real.h[static_cast<std::size_t>(t) * n_users + k] =
                    cplx{gen.gaussian() * kHalf, gen.gaussian() * kHalf};
            } else {
                real.h[static_cast<std::size_t>(t) * n_users + k] =
                    real.h[static_cast<std::size_t>(t - 1) * n_users + k];
            }
        }
    }
    return real;
}

void apply_channel_into(std::span<const std::vector<cplx>> x, const ChannelRealization& real,
                        int t, rng::Xoshiro256pp& noise, std::span<cplx> out) {
    const int n = static_cast<int>(out.size());
    for (const auto& xk : x)
        if (static_cast<int>(xk.size()) != n)
            throw std::invalid_argument("apply_channel: codeword length mismatch");
    const double sd = std::sqrt(real.sigma2 / 2.0);
    for (int i = 0; i < n; ++i) out[i] = cplx{};
    for (std::size_t k = 0; k < x.size(); ++k) {
        const cplx hk = real.coeff(t, static_cast<int>(k));
        for (int i = 0; i < n; ++i) out[i] += hk * x[k][i];
    }
    for (int i = 0; i < n; ++i) out[i] += cplx{noise.gaussian() * sd, noise.gaussian() * sd};
}

std::vector<cplx> apply_channel(std::span<const std::vector<cplx>> x,
                                const ChannelRealization& real, int t,
                                rng::Xoshiro256pp& noise) {
    if (x.empty()) throw std::invalid_argument("apply_channel: no codewords");
    std::vector<cplx> out(x.front().size());
    apply_channel_into(x, real, t, noise, out);
    return out;
}

double sigma2_from_snr_db(double embn0_db, double rate, int bits_per_symbol, double e_s) {
    if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("sigma2_from_snr_db: bad rate");
    if (bits_per_symbol < 1) throw std::invalid_argument("sigma2_from_snr_db: bad bits_per_symbol");
    if (e_s <= 0.0) throw std::invalid_argument("sigma2_from_snr_db: bad symbol energy");
    const double e_mb = e_s / (static_cast<double>(bits_per_symbol) * rate);
    return e_mb / std::pow(10.0, embn0_db / 10.0);
}

}  // namespace scmapolar::channel
