#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "truncld/rng.hpp"

namespace truncld {

/// Work split for Monte Carlo loops. chunk_size fixes the partition of the
/// sample index range; workers only decide who computes which chunk.
struct ParallelConfig {
    std::size_t workers = 1;
    std::size_t chunk_size = 256;
};

/// Runs body(stream, begin, end, acc) over [0, total) in chunks of cfg.chunk_size.
/// Chunk c uses Stream::split(seed, c) and its own Acc; the per-chunk results are
/// merged in chunk order, so the outcome is independent of cfg.workers.
template <class Acc, class Body>
Acc run_chunked(std::uint64_t seed, std::size_t total, const ParallelConfig& cfg, Body body) {
    const std::size_t chunk = std::max<std::size_t>(1, cfg.chunk_size);
    const std::size_t n_chunks = (total + chunk - 1) / chunk;
    std::vector<Acc> parts(n_chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                Stream rng = Stream::split(seed, c);
                const std::size_t begin = c * chunk;
                body(rng, begin, std::min(total, begin + chunk), parts[c]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
                return;
            }
        }
    };

    const std::size_t n_workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, n_chunks));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    Acc total_acc{};
    for (const auto& p : parts) total_acc.merge(p);
    return total_acc;
}

}  // namespace truncld
