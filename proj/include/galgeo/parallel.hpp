#pragma once

#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace galgeo {

inline int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Splits [0, n) into contiguous chunks, runs `work(state, begin, end)` on each,
// and merges the per-chunk states in chunk order. Results are therefore
// independent of the worker count as long as `merge` is associative over
// adjacent ranges (histogram addition, min/max, set union all qualify).
template <typename State, typename Work, typename Merge>
State parallel_reduce(std::uint64_t n, int workers, State init, Work work, Merge merge) {
    if (workers < 1) workers = 1;
    std::uint64_t chunks = static_cast<std::uint64_t>(workers);
    if (chunks > n) chunks = n == 0 ? 1 : n;

    std::vector<State> states(static_cast<std::size_t>(chunks), init);
    if (chunks <= 1) {
        work(states[0], 0, n);
        return std::move(states[0]);
    }

    std::uint64_t per = n / chunks;
    std::uint64_t extra = n % chunks;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(chunks));
    std::uint64_t begin = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        std::uint64_t len = per + (c < extra ? 1 : 0);
        std::uint64_t end = begin + len;
        pool.emplace_back([&work, &states, c, begin, end]() { work(states[c], begin, end); });
        begin = end;
    }
    for (auto& t : pool) t.join();

    State acc = std::move(states[0]);
    for (std::uint64_t c = 1; c < chunks; ++c) merge(acc, std::move(states[c]));
    return acc;
}

}  // namespace galgeo
