#include "scmapolar/scma.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scmapolar::scma {
namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

[[noreturn]] void format_error(const std::string& path, const std::string& what) {
    throw std::runtime_error("codebook '" + path + "': " + what);
}

std::vector<int> parse_label_line(const std::string& line, int m, const std::string& path) {
    std::istringstream ss(line);
    std::vector<int> perm;
    int v;
    while (ss >> v) perm.push_back(v);
    if (static_cast<int>(perm.size()) != m) format_error(path, "label permutation needs M entries");
    std::vector<std::uint8_t> seen(m, 0);
    for (int idx : perm) {
        if (idx < 0 || idx >= m || seen[idx]) format_error(path, "label permutation not a bijection");
        seen[idx] = 1;
    }
    return perm;
}

}  // namespace

void ScmaCodebook::validate() const {
    if (n_resources <= 0 || n_users <= 0) throw std::runtime_error("codebook: empty dimensions");
    if (!is_pow2(m_points)) throw std::runtime_error("codebook: M must be a power of two");

    // Regular graph: equal column weights |D_k| and row weights |C_n|.
    const std::size_t dk = user_resources.empty() ? 0 : user_resources[0].size();
    for (const auto& d : user_resources)
        if (d.size() != dk || d.empty()) throw std::runtime_error("codebook: unequal user degrees");
    const std::size_t cn = resource_users.empty() ? 0 : resource_users[0].size();
    for (const auto& c : resource_users)
        if (c.size() != cn || c.empty())
            throw std::runtime_error("codebook: unequal resource degrees");

    // Sparsity: points vanish exactly off the mapping support.
    for (int n = 0; n < n_resources; ++n) {
        for (int k = 0; k < n_users; ++k) {
            bool any = false;
            for (int c = 0; c < m_points; ++c) any = any || std::abs(point(n, k, c)) > 0.0;
            if (any != maps(n, k))
                throw std::runtime_error("codebook: zero pattern disagrees with mapping matrix");
        }
    }
}

ScmaCodebook load_codebook(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open codebook file: " + path);

    auto next_line = [&](std::string& line) {
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };

    std::string line;
    if (!next_line(line)) format_error(path, "missing header");
    ScmaCodebook cb;
    {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            if (tok.rfind("N=", 0) == 0) cb.n_resources = std::stoi(tok.substr(2));
            else if (tok.rfind("K=", 0) == 0) cb.n_users = std::stoi(tok.substr(2));
            else if (tok.rfind("M=", 0) == 0) cb.m_points = std::stoi(tok.substr(2));
            else format_error(path, "unexpected header token '" + tok + "'");
        }
    }
    if (cb.n_resources <= 0 || cb.n_users <= 0 || cb.m_points <= 0)
        format_error(path, "bad N/K/M header");
    if (!is_pow2(cb.m_points)) format_error(path, "M must be a power of two");
    cb.bits_per_symbol = 0;
    while ((1 << cb.bits_per_symbol) < cb.m_points) ++cb.bits_per_symbol;

    cb.mapping.assign(static_cast<std::size_t>(cb.n_resources) * cb.n_users, 0);
    for (int n = 0; n < cb.n_resources; ++n) {
        if (!next_line(line)) format_error(path, "missing mapping matrix row");
        std::istringstream ss(line);
        for (int k = 0; k < cb.n_users; ++k) {
            int v;
            if (!(ss >> v) || (v != 0 && v != 1)) format_error(path, "bad mapping matrix entry");
            cb.mapping[static_cast<std::size_t>(n) * cb.n_users + k] = static_cast<std::uint8_t>(v);
        }
    }

    cb.points.assign(static_cast<std::size_t>(cb.n_resources) * cb.n_users * cb.m_points, cplx{});
    for (int n = 0; n < cb.n_resources; ++n) {
        for (int k = 0; k < cb.n_users; ++k) {
            if (!cb.maps(n, k)) continue;
            if (!next_line(line)) format_error(path, "missing point line");
            std::istringstream ss(line);
            for (int c = 0; c < cb.m_points; ++c) {
                std::string tok;
                if (!(ss >> tok)) format_error(path, "point line too short");
                const auto comma = tok.find(',');
                if (comma == std::string::npos) format_error(path, "point must be re,im");
                double re, im;
                try {
                    re = std::stod(tok.substr(0, comma));
                    im = std::stod(tok.substr(comma + 1));
                } catch (const std::exception&) {
                    format_error(path, "bad complex number '" + tok + "'");
                }
                cb.points[(static_cast<std::size_t>(n) * cb.n_users + k) * cb.m_points + c] = {re, im};
            }
        }
    }

    if (!next_line(line) || line.rfind("gray:", 0) != 0) format_error(path, "missing gray: line");
    cb.gray_label_to_index = parse_label_line(line.substr(5), cb.m_points, path);
    if (!next_line(line) || line.rfind("sp:", 0) != 0) format_error(path, "missing sp: line");
    cb.sp_label_to_index = parse_label_line(line.substr(3), cb.m_points, path);
    if (next_line(line)) format_error(path, "trailing content after label lines");

    cb.user_resources.assign(cb.n_users, {});
    cb.resource_users.assign(cb.n_resources, {});
    for (int n = 0; n < cb.n_resources; ++n) {
        for (int k = 0; k < cb.n_users; ++k) {
            if (cb.maps(n, k)) {
                cb.user_resources[k].push_back(n);
                cb.resource_users[n].push_back(k);
            }
        }
    }

    // Normalize each user's average codeword energy to 1.
    for (int k = 0; k < cb.n_users; ++k) {
        double energy = 0.0;
        for (int n : cb.user_resources[k])
            for (int c = 0; c < cb.m_points; ++c) energy += std::norm(cb.point(n, k, c));
        energy /= cb.m_points;
        if (energy <= 0.0) format_error(path, "user with zero energy");
        const double scale = 1.0 / std::sqrt(energy);
        for (int n : cb.user_resources[k])
            for (int c = 0; c < cb.m_points; ++c)
                cb.points[(static_cast<std::size_t>(n) * cb.n_users + k) * cb.m_points + c] *= scale;
    }

    cb.validate();
    return cb;
}

void save_codebook(const ScmaCodebook& cb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write codebook file: " + path);
    out << "N=" << cb.n_resources << " K=" << cb.n_users << " M=" << cb.m_points << "\n";
    for (int n = 0; n < cb.n_resources; ++n) {
        for (int k = 0; k < cb.n_users; ++k) out << (cb.maps(n, k) ? 1 : 0) << (k + 1 < cb.n_users ? " " : "");
        out << "\n";
    }
    out.precision(17);
    for (int n = 0; n < cb.n_resources; ++n) {
        for (int k = 0; k < cb.n_users; ++k) {
            if (!cb.maps(n, k)) continue;
            for (int c = 0; c < cb.m_points; ++c) {
                const cplx p = cb.point(n, k, c);
                out << p.real() << "," << p.imag() << (c + 1 < cb.m_points ? " " : "");
            }
            out << "\n";
        }
    }
    out << "gray:";
    for (int v : cb.gray_label_to_index) out << " " << v;
    out << "\nsp:";
    for (int v : cb.sp_label_to_index) out << " " << v;
    out << "\n";
}

std::vector<cplx> scma_modulate(int user, int index, const ScmaCodebook& cb) {
    std::vector<cplx> x(cb.n_resources);
    scma_modulate_into(user, index, cb, x);
    return x;
}

void scma_modulate_into(int user, int index, const ScmaCodebook& cb, std::span<cplx> out) {
    if (user < 0 || user >= cb.n_users || index < 0 || index >= cb.m_points)
        throw std::invalid_argument("scma_modulate: bad user or symbol index");
    if (static_cast<int>(out.size()) != cb.n_resources)
        throw std::invalid_argument("scma_modulate: output span size mismatch");
    for (int n = 0; n < cb.n_resources; ++n) out[n] = cb.point(n, user, index);
}

}  // namespace scmapolar::scma
