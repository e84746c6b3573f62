#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace dehaze {

/// Runs body(i) for i in [0, count) on up to `threads` workers using a static
/// contiguous partition. Callers write to disjoint outputs indexed by i, so the
/// result never depends on the worker count.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body)
{
    if (count <= 0) {
        return;
    }
    const int workers = std::clamp(threads, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&body, begin, end] {
            for (int i = begin; i < end; ++i) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace dehaze
