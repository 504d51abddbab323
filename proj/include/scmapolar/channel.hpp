#pragma once

#include <complex>
#include <span>
#include <vector>

#include "scmapolar/rng.hpp"

namespace scmapolar::channel {

using cplx = std::complex<double>;

enum class FadingModel { fast, block };

/// Rayleigh coefficients per (channel use, user) plus the noise variance.
/// A user sees the same coefficient on all of its occupied resources within
/// one channel use, so one complex value per (t, k) suffices.
struct ChannelRealization {
    int n_users = 0;
    int n_uses = 0;
    double sigma2 = 0.0;
    std::vector<cplx> h;  // t * n_users + k

    cplx coeff(int t, int k) const { return h[static_cast<std::size_t>(t) * n_users + k]; }
    std::span<const cplx> use(int t) const {
        return {h.data() + static_cast<std::size_t>(t) * n_users, static_cast<std::size_t>(n_users)};
    }
};

/// Unit-variance circularly-symmetric complex Gaussian fades.  fast draws a
/// fresh coefficient per use; block holds it over block_len consecutive uses
/// (blocks aligned to the frame start, final block possibly truncated).
ChannelRealization draw_channel(FadingModel model, int n_uses, int n_users,
                                rng::Xoshiro256pp& gen, int block_len = 18);

/// r = sum_k diag(h_k) x_k + w for channel use t, with w ~ CN(0, sigma2 I)
/// (sigma2 is the per-component complex noise variance).
void apply_channel_into(std::span<const std::vector<cplx>> x, const ChannelRealization& real,
                        int t, rng::Xoshiro256pp& noise, std::span<cplx> out);
std::vector<cplx> apply_channel(std::span<const std::vector<cplx>> x,
                                const ChannelRealization& real, int t,
                                rng::Xoshiro256pp& noise);

/// Noise variance from Emb/N0 in dB: the energy per message bit is
/// e_s / (bits_per_symbol * rate), and N0 is identified with sigma2.
double sigma2_from_snr_db(double embn0_db, double rate, int bits_per_symbol, double e_s = 1.0);

}  // namespace scmapolar::channel
