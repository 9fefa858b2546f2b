#pragma once

// Deterministic parallel reduction.  Work is cut into fixed-size chunks;
// chunk partials are accumulated in index order, so the result is bitwise
// identical however many threads run.

#include <cstddef>
#include <thread>
#include <vector>

namespace p1lab {

inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// element-wise parallel loop (no reduction, deterministic trivially)
template <typename F>
void par_for(std::size_t n, F&& body) {
    const unsigned nw = worker_count();
    if (nw <= 1 || n < 8192) {
        for (std::size_t j = 0; j < n; ++j) body(j);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t per = (n + nw - 1) / nw;
    for (unsigned t = 0; t < nw; ++t) {
        const std::size_t j0 = t * per, j1 = std::min(n, j0 + per);
        if (j0 >= j1) break;
        pool.emplace_back([&body, j0, j1] {
            for (std::size_t j = j0; j < j1; ++j) body(j);
        });
    }
    for (auto& th : pool) th.join();
}

template <typename T, typename F>
T chunked_sum(std::size_t n, F&& term) {
    constexpr std::size_t chunk = 4096;
    const std::size_t nchunks = (n + chunk - 1) / chunk;
    std::vector<T> partial(nchunks, T(0));
    auto run = [&](std::size_t c0, std::size_t c1) {
        for (std::size_t c = c0; c < c1; ++c) {
            T s = T(0);
            const std::size_t hi = std::min(n, (c + 1) * chunk);
            for (std::size_t j = c * chunk; j < hi; ++j) s += term(j);
            partial[c] = s;
        }
    };
    const unsigned nw = static_cast<unsigned>(
        std::min<std::size_t>(worker_count(), nchunks));
    if (nw <= 1) {
        run(0, nchunks);
    } else {
        std::vector<std::thread> pool;
        const std::size_t per = (nchunks + nw - 1) / nw;
        for (unsigned t = 0; t < nw; ++t) {
            const std::size_t c0 = t * per;
            const std::size_t c1 = std::min(nchunks, c0 + per);
            if (c0 >= c1) break;
            pool.emplace_back(run, c0, c1);
        }
        for (auto& th : pool) th.join();
    }
    T total = T(0);
    for (const T& p : partial) total += p;
    return total;
}

} // namespace p1lab
