#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace scmapolar {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls fn(frame_index, worker_id) for every index in [begin, end), frames
/// distributed round-robin over workers.  Results must be accumulated into
/// per-worker state and merged afterwards; per-frame outcomes depend only on
/// the frame index, so any worker count yields identical aggregates.
template <class Fn>
void parallel_frames(std::uint64_t begin, std::uint64_t end, int n_workers, Fn&& fn) {
    if (n_workers <= 1 || end <= begin + 1) {
        for (std::uint64_t f = begin; f < end; ++f) fn(f, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&fn, begin, end, n_workers, w] {
            for (std::uint64_t f = begin + static_cast<std::uint64_t>(w); f < end;
                 f += static_cast<std::uint64_t>(n_workers))
                fn(f, w);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace scmapolar
