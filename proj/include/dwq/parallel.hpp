/*
   Copyright 2026 The dwq Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dwq {

/// Worker count from DWQ_WORKERS, falling back to the hardware concurrency.
inline unsigned default_workers()
{
    if (const char* env = std::getenv("DWQ_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Items are claimed
/// dynamically; callers write results into per-item slots so the outcome
/// does not depend on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    pool.clear();
    if (error) std::rethrow_exception(error);
}

/// Fixed-shape pairwise sum of equally sized vectors: the association order
/// depends only on the number of parts.
inline std::vector<double> pairwise_sum(std::vector<std::vector<double>> parts)
{
    if (parts.empty()) return {};
    while (parts.size() > 1) {
        std::vector<std::vector<double>> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            auto& a = parts[i];
            const auto& b = parts[i + 1];
            for (std::size_t k = 0; k < a.size(); ++k) a[k] += b[k];
            next.push_back(std::move(a));
        }
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

/// Deterministic parallel map-reduce: sums fn(i) over i in [0, n). Items are
/// grouped into at most 64 contiguous blocks (the grouping depends only on
/// n), each block is summed in index order and the block sums are combined
/// with pairwise_sum, so the result is independent of the worker count.
template <class Fn>
std::vector<double> blocked_sum(std::size_t n, unsigned workers, Fn&& fn)
{
    if (n == 0) return {};
    constexpr std::size_t max_blocks = 64;
    const std::size_t per = (n + max_blocks - 1) / max_blocks;
    const std::size_t blocks = (n + per - 1) / per;
    std::vector<std::vector<double>> sums(blocks);
    parallel_for(blocks, workers, [&](std::size_t b) {
        const std::size_t lo = b * per, hi = std::min(n, lo + per);
        std::vector<double> acc;
        for (std::size_t i = lo; i < hi; ++i) {
            std::vector<double> v = fn(i);
            if (acc.empty()) {
                acc = std::move(v);
                continue;
            }
            if (v.size() != acc.size()) throw std::length_error("blocked_sum: contributions differ in size");
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
        }
        sums[b] = std::move(acc);
    });
    return pairwise_sum(std::move(sums));
}

} // namespace dwq
