#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace fraclap {

// Static-partition parallel loop. Partitioning depends only on (n, n_threads),
// so results that are written into disjoint slots are reproducible for a fixed
// thread count.
template <class Fn>
void parallel_for(int n, int n_threads, Fn&& fn) {
    n_threads = std::max(1, std::min(n_threads, n));
    if (n_threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        const int lo = static_cast<int>(static_cast<long long>(n) * t / n_threads);
        const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / n_threads);
        pool.emplace_back([lo, hi, &fn]() {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Map-reduce with per-chunk partial results combined in chunk order, so the
// floating-point reduction order is fixed for a fixed thread count.
template <class T, class Map, class Combine>
T parallel_reduce(int n, int n_threads, T init, Map&& map, Combine&& combine) {
    n_threads = std::max(1, std::min(n_threads, std::max(n, 1)));
    std::vector<T> partial(n_threads, init);
    parallel_for(n_threads, n_threads, [&](int t) {
        const int lo = static_cast<int>(static_cast<long long>(n) * t / n_threads);
        const int hi = static_cast<int>(static_cast<long long>(n) * (t + 1) / n_threads);
        T acc = init;
        for (int i = lo; i < hi; ++i) acc = combine(acc, map(i));
        partial[t] = acc;
    });
    T acc = init;
    for (const T& p : partial) acc = combine(acc, p);
    return acc;
}

}  // namespace fraclap
