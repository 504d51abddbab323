#include "scmapolar/mpa.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "scmapolar/kernels.hpp"

namespace scmapolar::mpa {
namespace {

void normalize_or_uniform(std::span<double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    if (sum > 0.0 && std::isfinite(sum)) {
        const double inv = 1.0 / sum;
        for (double& x : v) x *= inv;
    } else {
        std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    }
}

}  // namespace

double channel_likelihood(cplx r_n, std::span<const int> combo, int resource,
                          const scma::ScmaCodebook& cb, std::span<const cplx> h_user,
                          double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("channel_likelihood: sigma2 must be positive");
    const auto& users = cb.resource_users[resource];
    if (combo.size() != users.size())
        throw std::invalid_argument("channel_likelihood: combo size must match |C_n|");
    cplx sum{};
    for (std::size_t j = 0; j < users.size(); ++j) {
        const int k = users[j];
        sum += h_user[k] * cb.point(resource, k, combo[j]);
    }
    const double resid = std::norm(r_n - sum);
    return std::exp(-resid / (2.0 * sigma2)) / (2.0 * std::numbers::pi * sigma2);
}

MpaDetector::MpaDetector(const scma::ScmaCodebook* cb, int n_iters) : cb_(cb), n_iters_(n_iters) {
    if (n_iters_ < 1) throw std::invalid_argument("mpa: n_iters must be >= 1");
    const int deg = static_cast<int>(cb_->resource_users[0].size());
    combos_ = 1;
    for (int j = 0; j < deg; ++j) combos_ *= cb_->m_points;
    resource_edges_.resize(cb_->n_resources);
    user_edges_.resize(cb_->n_users);
    for (int n = 0; n < cb_->n_resources; ++n) {
        const auto& users = cb_->resource_users[n];
        for (std::size_t j = 0; j < users.size(); ++j) {
            const int k = users[j];
            Edge e;
            e.resource = n;
            e.user = k;
            e.pos_in_resource = static_cast<int>(j);
            e.pos_in_user = static_cast<int>(user_edges_[k].size());
            resource_edges_[n].push_back(static_cast<int>(edges_.size()));
            user_edges_[k].push_back(static_cast<int>(edges_.size()));
            edges_.push_back(e);
        }
    }
    fast_m4d3_ = (cb_->m_points == 4 && deg == 3);
}

void MpaDetector::build_log_table(int n, cplx r_n, std::span<const cplx> h_user, double sigma2,
                                  double* out, double* out_max) const {
    const int m = cb_->m_points;
    const auto& users = cb_->resource_users[n];
    const int deg = static_cast<int>(users.size());
    const double prefactor = -std::log(2.0 * std::numbers::pi * sigma2);
    const double inv2s = 1.0 / (2.0 * sigma2);

    // Odometer over (c_0 .. c_{deg-1}), first member slowest.
    std::vector<int> digit(deg, 0);
    std::vector<cplx> partial(deg + 1);
    partial[0] = cplx{};
    for (int j = 0; j < deg; ++j)
        partial[j + 1] = partial[j] + h_user[users[j]] * cb_->point(n, users[j], 0);

    double best = -std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < combos_; ++idx) {
        const double v = prefactor - std::norm(r_n - partial[deg]) * inv2s;
        out[idx] = v;
        if (v > best) best = v;
        // advance odometer from the fastest digit
        for (int j = deg - 1; j >= 0; --j) {
            if (++digit[j] < m) {
                partial[j + 1] = partial[j] + h_user[users[j]] * cb_->point(n, users[j], digit[j]);
                for (int l = j + 1; l < deg; ++l) {
                    digit[l] = 0;
                    partial[l + 1] = partial[l] + h_user[users[l]] * cb_->point(n, users[l], 0);
                }
                break;
            }
        }
    }
    *out_max = best;
}

void MpaDetector::resource_update_into(int n, const double* lin_table, const double* perm_base,
                                       std::span<const double> incoming, int /*stride*/,
                                       double* out_all) const {
    const int m = cb_->m_points;
    const auto& users = cb_->resource_users[n];
    const int deg = static_cast<int>(users.size());
    if (fast_m4d3_) {
        const auto& kt = kernels::active();
        static constexpr int partner_a[3] = {1, 0, 0};
        static constexpr int partner_b[3] = {2, 2, 1};
        for (int j = 0; j < 3; ++j) {
            kt.mpa_res_update_m4(perm_base + j * 64, incoming.data() + partner_a[j] * 4,
                                 incoming.data() + partner_b[j] * 4, out_all + j * 4);
        }
        return;
    }
    std::fill(out_all, out_all + static_cast<std::size_t>(deg) * m, 0.0);
    std::vector<int> digit(deg, 0);
    for (int idx = 0; idx < combos_; ++idx) {
        // prefix[j] = prod of incoming messages of members < j,
        // suffix likewise; product-except-j = prefix[j] * suffix[j+1].
        double prefix = 1.0;
        for (int j = 0; j < deg; ++j) {
            double suffix = 1.0;
            for (int l = j + 1; l < deg; ++l) suffix *= incoming[l * m + digit[l]];
            out_all[j * m + digit[j]] += lin_table[idx] * prefix * suffix;
            prefix *= incoming[j * m + digit[j]];
        }
        for (int j = deg - 1; j >= 0; --j) {
            if (++digit[j] < m) break;
            digit[j] = 0;
        }
    }
}

SymbolPosteriors MpaDetector::detect(std::span<const cplx> r, std::span<const cplx> h_user,
                                     double sigma2, Workspace& ws, const Options& opt) const {
    const int m = cb_->m_points;
    const int n_res = cb_->n_resources;
    const int n_usr = cb_->n_users;
    const int deg = static_cast<int>(cb_->resource_users[0].size());
    if (static_cast<int>(r.size()) != n_res || static_cast<int>(h_user.size()) != n_usr)
        throw std::invalid_argument("mpa_detect: r/h size mismatch");
    if (sigma2 <= 0.0) throw std::invalid_argument("mpa_detect: sigma2 must be positive");
    for (cplx v : r)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::domain_error("mpa_detect: non-finite received sample");
    for (cplx v : h_user)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::domain_error("mpa_detect: non-finite channel coefficient");

    const std::size_t n_edges = edges_.size();
    ws.log_table.resize(static_cast<std::size_t>(combos_));
    ws.lin_table.resize(static_cast<std::size_t>(n_res) * combos_);
    if (fast_m4d3_) ws.perm_table.resize(static_cast<std::size_t>(n_res) * 3 * 64);
    ws.mu_user.assign(n_edges * m, 1.0 / m);
    ws.mu_res.assign(n_edges * m, 0.0);
    ws.scratch.resize(2 * static_cast<std::size_t>(deg) * m);

    for (int n = 0; n < n_res; ++n) {
        double mx = 0.0;
        build_log_table(n, r[n], h_user, sigma2, ws.log_table.data(), &mx);
        if (!opt.resource_log_offsets.empty()) {
            for (double& v : ws.log_table) v += opt.resource_log_offsets[n];
            mx += opt.resource_log_offsets[n];
        }
        double* lin = ws.lin_table.data() + static_cast<std::size_t>(n) * combos_;
        for (int idx = 0; idx < combos_; ++idx) lin[idx] = std::exp(ws.log_table[idx] - mx);
        if (fast_m4d3_) {
            double* perm = ws.perm_table.data() + static_cast<std::size_t>(n) * 3 * 64;
            for (int c0 = 0; c0 < 4; ++c0)
                for (int c1 = 0; c1 < 4; ++c1)
                    for (int c2 = 0; c2 < 4; ++c2) {
                        const double v = lin[c0 * 16 + c1 * 4 + c2];
                        perm[0 * 64 + (c1 * 4 + c2) * 4 + c0] = v;
                        perm[1 * 64 + (c0 * 4 + c2) * 4 + c1] = v;
                        perm[2 * 64 + (c0 * 4 + c1) * 4 + c2] = v;
                    }
        }
    }

    double* gather = ws.scratch.data();
    double* produced = ws.scratch.data() + static_cast<std::size_t>(deg) * m;
    for (int it = 0; it < n_iters_; ++it) {
        for (int n = 0; n < n_res; ++n) {
            const auto& redges = resource_edges_[n];
            for (std::size_t j = 0; j < redges.size(); ++j)
                std::memcpy(gather + j * m, ws.mu_user.data() + static_cast<std::size_t>(redges[j]) * m,
                            sizeof(double) * m);
            resource_update_into(n, ws.lin_table.data() + static_cast<std::size_t>(n) * combos_,
                                 fast_m4d3_ ? ws.perm_table.data() + static_cast<std::size_t>(n) * 3 * 64
                                            : nullptr,
                                 {gather, static_cast<std::size_t>(deg) * m}, m, produced);
            for (std::size_t j = 0; j < redges.size(); ++j) {
                double* dst = ws.mu_res.data() + static_cast<std::size_t>(redges[j]) * m;
                std::memcpy(dst, produced + j * m, sizeof(double) * m);
                normalize_or_uniform({dst, static_cast<std::size_t>(m)});
            }
        }
        for (int k = 0; k < n_usr; ++k) {
            const auto& uedges = user_edges_[k];
            for (std::size_t i = 0; i < uedges.size(); ++i) {
                double* dst = ws.mu_user.data() + static_cast<std::size_t>(uedges[i]) * m;
                for (int c = 0; c < m; ++c) {
                    double prod = 1.0;
                    for (std::size_t j = 0; j < uedges.size(); ++j) {
                        if (j == i) continue;
                        prod *= ws.mu_res[static_cast<std::size_t>(uedges[j]) * m + c];
                    }
                    dst[c] = prod;
                }
                normalize_or_uniform({dst, static_cast<std::size_t>(m)});
            }
        }
    }

    SymbolPosteriors post;
    post.n_users = n_usr;
    post.m_points = m;
    post.p.assign(static_cast<std::size_t>(n_usr) * m, 0.0);
    for (int k = 0; k < n_usr; ++k) {
        auto row = post.row(k);
        for (int c = 0; c < m; ++c) {
            double prod = 1.0;
            for (int e : user_edges_[k]) prod *= ws.mu_res[static_cast<std::size_t>(e) * m + c];
            row[c] = prod;
        }
        normalize_or_uniform(row);
    }
    return post;
}

std::vector<double> MpaDetector::resource_message(int n, int k, cplx r_n,
                                                  std::span<const cplx> h_user, double sigma2,
                                                  std::span<const double> incoming) const {
    const int m = cb_->m_points;
    const auto& users = cb_->resource_users[n];
    const int deg = static_cast<int>(users.size());
    if (incoming.size() != static_cast<std::size_t>(deg) * m)
        throw std::invalid_argument("resource_message: incoming must be deg x M");
    const auto it = std::find(users.begin(), users.end(), k);
    if (it == users.end()) throw std::invalid_argument("resource_message: user not on resource");
    const int pos = static_cast<int>(it - users.begin());

    std::vector<double> log_table(combos_);
    double mx = 0.0;
    build_log_table(n, r_n, h_user, sigma2, log_table.data(), &mx);
    std::vector<double> lin(combos_);
    for (int idx = 0; idx < combos_; ++idx) lin[idx] = std::exp(log_table[idx] - mx);

    std::vector<double> out_all(static_cast<std::size_t>(deg) * m, 0.0);
    std::vector<double> perm;
    if (fast_m4d3_) {
        perm.resize(3 * 64);
        for (int c0 = 0; c0 < 4; ++c0)
            for (int c1 = 0; c1 < 4; ++c1)
                for (int c2 = 0; c2 < 4; ++c2) {
                    const double v = lin[c0 * 16 + c1 * 4 + c2];
                    perm[0 * 64 + (c1 * 4 + c2) * 4 + c0] = v;
                    perm[1 * 64 + (c0 * 4 + c2) * 4 + c1] = v;
                    perm[2 * 64 + (c0 * 4 + c1) * 4 + c2] = v;
                }
    }
    resource_update_into(n, lin.data(), perm.data(), incoming, m, out_all.data());

    std::vector<double> msg(m);
    const double scale = std::exp(mx);
    for (int c = 0; c < m; ++c) msg[c] = out_all[static_cast<std::size_t>(pos) * m + c] * scale;
    return msg;
}

}  // namespace scmapolar::mpa
