#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "scmapolar/common.hpp"

namespace scmapolar::scma {

using cplx = std::complex<double>;

enum class Labeling { gray, sp };

/// Sparse codebook for K users over N shared resources: an N x K binary
/// mapping matrix plus, for every occupied (resource, user) slot, M complex
/// constellation points.  Loading normalizes every user's average codeword
/// energy to 1.
struct ScmaCodebook {
    int n_resources = 0;  // N
    int n_users = 0;      // K
    int m_points = 0;     // M
    int bits_per_symbol = 0;

    std::vector<std::uint8_t> mapping;            // N x K, row-major
    std::vector<cplx> points;                     // ((n*K)+k)*M + c
    std::vector<int> gray_label_to_index;         // size M
    std::vector<int> sp_label_to_index;           // size M
    std::vector<std::vector<int>> user_resources; // D_k per user
    std::vector<std::vector<int>> resource_users; // C_n per resource

    bool maps(int n, int k) const { return mapping[static_cast<std::size_t>(n) * n_users + k] != 0; }
    cplx point(int n, int k, int c) const {
        return points[(static_cast<std::size_t>(n) * n_users + k) * m_points + c];
    }
    const std::vector<int>& labels(Labeling l) const {
        return l == Labeling::gray ? gray_label_to_index : sp_label_to_index;
    }

    void validate() const;  // throws std::runtime_error on structural problems
};

ScmaCodebook load_codebook(const std::string& path);
void save_codebook(const ScmaCodebook& cb, const std::string& path);

/// Length-N sparse codeword of user k for symbol index c.
std::vector<cplx> scma_modulate(int user, int index, const ScmaCodebook& cb);
void scma_modulate_into(int user, int index, const ScmaCodebook& cb, std::span<cplx> out);

}  // namespace scmapolar::scma
