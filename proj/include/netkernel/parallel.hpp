#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace netkernel {

// Process-wide worker count for the parallel helpers below. All reductions
// are organized over fixed-size blocks so results are bit-identical for any
// thread count.
int num_threads();
void set_num_threads(int n);

// Runs fn(block_index, begin, end) over [0, total) split into fixed blocks.
// Work is distributed over threads by block index; the caller owns any
// per-block output slots.
void parallel_blocks(std::size_t total, std::size_t block_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Runs fn(i) for i in [0, total).
void parallel_for(std::size_t total, const std::function<void(std::size_t)>& fn);

// Pairwise tree reduction over per-block partials; combine(dst, src) folds
// src into dst. The reduction structure depends only on the number of blocks.
template <typename T, typename Combine>
T reduce_pairwise(std::vector<T> parts, Combine combine) {
    std::size_t n = parts.size();
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t k = 0; k + half < n; ++k) combine(parts[k], parts[k + half]);
        n = half;
    }
    return std::move(parts[0]);
}

}  // namespace netkernel
