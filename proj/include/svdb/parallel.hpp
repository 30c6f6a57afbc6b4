// Copyright 2026 The svdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace svdb {

inline int resolve_thread_count(int requested)
{
    if (requested > 0)
        return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

/// Runs fn(i) for i in [0, n). Work items are handed out in chunks from an
/// atomic counter; fn must only write state owned by item i, so results do
/// not depend on the number of workers.
template <typename Fn>
void parallel_for(std::int64_t n, const Fn& fn, int threads = 0)
{
    if (n <= 0)
        return;
    int workers = resolve_thread_count(threads);
    if (workers <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::int64_t chunk = std::max<std::int64_t>(1, n / (std::int64_t(workers) * 8));
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::int64_t begin = next.fetch_add(chunk);
            if (begin >= n)
                return;
            std::int64_t end = std::min(begin + chunk, n);
            for (std::int64_t i = begin; i < end; ++i)
                fn(i);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers - 1));
    for (int t = 1; t < workers; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
}

} // namespace svdb
