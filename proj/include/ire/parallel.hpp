// Copyright 2026 The ire-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IRE_PARALLEL_HPP
#define IRE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace ire
{

// Explicit request, else IRE_SIM_THREADS, else hardware concurrency (min 1).
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

namespace detail
{

// Runs body(worker) on n workers and rethrows the first exception.
template <class Body> void run_workers(unsigned n, Body &&body)
{
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto guarded = [&](unsigned w) {
        try {
            body(w);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
        }
    };
    if (n <= 1) {
        guarded(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned w = 0; w < n; ++w)
            pool.emplace_back(guarded, w);
        for (auto &t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace detail

// Computes compute(c) for every chunk c in [0, n_chunks) on up to 'threads'
// workers and hands the partials to merge(c, partial) strictly in ascending
// chunk order on the calling thread. The merged result therefore does not
// depend on the thread count.
template <class Partial, class Compute, class Merge>
void ordered_chunk_reduce(std::uint64_t n_chunks, unsigned threads, Compute &&compute, Merge &&merge)
{
    threads = std::max(1u, threads);
    const std::uint64_t wave = static_cast<std::uint64_t>(threads) * 4;
    std::vector<std::optional<Partial>> slots(static_cast<std::size_t>(std::min(wave, n_chunks)));

    for (std::uint64_t first = 0; first < n_chunks; first += wave) {
        const std::uint64_t count = std::min(wave, n_chunks - first);
        std::atomic<std::uint64_t> next{0};
        const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));
        detail::run_workers(workers, [&](unsigned) {
            for (std::uint64_t k = next++; k < count; k = next++)
                slots[k].emplace(compute(first + k));
        });
        for (std::uint64_t k = 0; k < count; ++k) {
            merge(first + k, std::move(*slots[k]));
            slots[k].reset();
        }
    }
}

// Static contiguous partition of [0, n) into per-worker ranges; body(begin, end)
// must write only to its own range.
template <class Body> void parallel_for(std::size_t n, unsigned threads, Body &&body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    const std::size_t per = (n + threads - 1) / threads;
    detail::run_workers(threads, [&](unsigned w) {
        const std::size_t begin = std::min(n, per * w);
        const std::size_t end = std::min(n, begin + per);
        if (begin < end)
            body(begin, end);
    });
}

} // namespace ire

#endif // IRE_PARALLEL_HPP
