#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace detour {

// Static-chunked parallel loop. Each index is processed exactly once and
// writes only to its own slot in the caller's output, so results are
// identical for any worker count.
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    int w = std::min(workers, n);
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (int t = 0; t < w; ++t) {
        threads.emplace_back([&, t] {
            for (int i = t; i < n; i += w) fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace detour
