#pragma once

#include <complex>
#include <span>
#include <vector>

#include "scmapolar/scma.hpp"

namespace scmapolar::mpa {

using cplx = scma::cplx;

/// Per-user symbol posteriors for one channel use; each row is a length-M
/// probability vector normalized to 1.
struct SymbolPosteriors {
    int n_users = 0;
    int m_points = 0;
    std::vector<double> p;

    std::span<const double> row(int user) const {
        return {p.data() + static_cast<std::size_t>(user) * m_points,
                static_cast<std::size_t>(m_points)};
    }
    std::span<double> row(int user) {
        return {p.data() + static_cast<std::size_t>(user) * m_points,
                static_cast<std::size_t>(m_points)};
    }
};

/// Gaussian likelihood of observing r_n on resource n when the users of C_n
/// transmit the symbol combination `combo` (one index per member of C_n, in
/// C_n order): (1/(2*pi*sigma2)) * exp(-|r_n - sum h*V|^2 / (2*sigma2)).
double channel_likelihood(cplx r_n, std::span<const int> combo, int resource,
                          const scma::ScmaCodebook& cb, std::span<const cplx> h_user,
                          double sigma2);

/// Message-passing multiuser detector on the user/resource factor graph.
/// One instance is immutable and shareable; per-call scratch lives in a
/// Workspace so distinct received vectors can be detected concurrently.
class MpaDetector {
public:
    struct Workspace {
        std::vector<double> log_table;
        std::vector<double> lin_table;    // per resource, exp(max-subtracted)
        std::vector<double> perm_table;   // M=4/deg-3 layouts, target-fastest
        std::vector<double> mu_user;      // user -> resource messages, per edge
        std::vector<double> mu_res;       // resource -> user messages, per edge
        std::vector<double> scratch;
    };

    struct Options {
        /// Additive per-resource offsets applied to the log-likelihood table;
        /// diagnostic knob for likelihood-scale sensitivity checks.
        std::span<const double> resource_log_offsets;
    };

    MpaDetector(const scma::ScmaCodebook* cb, int n_iters);

    SymbolPosteriors detect(std::span<const cplx> r, std::span<const cplx> h_user, double sigma2,
                            Workspace& ws, const Options& opt = {}) const;

    /// One resource-to-user update in raw likelihood scale: the message vector
    /// from resource n to user k given the incoming user messages of all C_n
    /// members (deg x M values in C_n order; the target's own row is unused).
    /// Computed through the production table/kernel path.
    std::vector<double> resource_message(int n, int k, cplx r_n, std::span<const cplx> h_user,
                                         double sigma2,
                                         std::span<const double> incoming) const;

    int n_iters() const { return n_iters_; }
    const scma::ScmaCodebook& codebook() const { return *cb_; }

private:
    struct Edge {
        int resource;
        int user;
        int pos_in_resource;  // index within C_n
        int pos_in_user;      // index within D_k
    };

    void build_log_table(int n, cplx r_n, std::span<const cplx> h_user, double sigma2,
                         double* out, double* out_max) const;
    void resource_update_into(int n, const double* lin_table, const double* perm_base,
                              std::span<const double> incoming, int stride, double* out_all) const;

    const scma::ScmaCodebook* cb_;
    int n_iters_;
    int combos_;  // M^deg per resource
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> resource_edges_;  // per resource: edge ids in C_n order
    std::vector<std::vector<int>> user_edges_;      // per user: edge ids in D_k order
    bool fast_m4d3_;
};

}  // namespace scmapolar::mpa
