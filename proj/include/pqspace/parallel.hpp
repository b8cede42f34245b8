#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace pqspace {

inline int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// Runs fn(task_index) for every index in [0, tasks). Each task must write
// only to its own output slot, so results do not depend on scheduling or on
// the thread count.
template <class Fn>
void run_parallel(std::size_t tasks, int threads, Fn&& fn) {
    if (threads <= 0) threads = hardware_threads();
    if (threads == 1 || tasks <= 1) {
        for (std::size_t i = 0; i < tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<std::size_t>(threads, tasks));
    pool.reserve(count);
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace pqspace
