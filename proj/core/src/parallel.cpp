#include "topoal/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace topoal {

namespace {

int detect_workers() {
    if (const char* env = std::getenv("TOPOAL_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

thread_local bool inside_parallel = false;

} // namespace

int worker_count() {
    static const int workers = detect_workers();
    return workers;
}

void parallel_for(int begin, int end, const std::function<void(int)>& body) {
    const int count = end - begin;
    if (count <= 0) return;

    const int workers = worker_count();
    if (workers == 1 || count == 1 || inside_parallel) {
        for (int i = begin; i < end; ++i) body(i);
        return;
    }

    const int grain = std::max(1, count / (workers * 8));
    std::atomic<int> next{begin};
    auto run = [&]() {
        inside_parallel = true;
        for (;;) {
            const int chunk_begin = next.fetch_add(grain);
            if (chunk_begin >= end) break;
            const int chunk_end = std::min(end, chunk_begin + grain);
            for (int i = chunk_begin; i < chunk_end; ++i) body(i);
        }
        inside_parallel = false;
    };

    std::vector<std::thread> pool;
    const int spawned = std::min(workers, count) - 1;
    pool.reserve(static_cast<std::size_t>(spawned));
    for (int t = 0; t < spawned; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

} // namespace topoal
