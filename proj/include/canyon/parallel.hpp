#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace canyon {

// Deterministic fan-out: the work is a fixed list of blocks numbered
// 0..n_blocks-1 whose boundaries never depend on the thread count; threads
// pull block indices from a shared counter and write results into
// preassigned slots, so the returned vector is identical for any number of
// threads. Callers derive per-block randomness from the block (or replica)
// index, never from thread identity.
//
// fn: BlockResult(std::uint64_t block_index), must not touch shared state.
template <typename BlockResult, typename BlockFn>
std::vector<BlockResult> run_blocks(std::uint64_t n_blocks, unsigned threads, BlockFn&& fn) {
    std::vector<BlockResult> results(static_cast<std::size_t>(n_blocks));
    if (n_blocks == 0) return results;
    if (threads <= 1 || n_blocks == 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) results[b] = fn(b);
        return results;
    }

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks || failed.load(std::memory_order_relaxed)) return;
            try {
                results[b] = fn(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const unsigned n_workers = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, n_blocks));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (first_error) std::rethrow_exception(first_error);
    return results;
}

// Block partition of replica indices [0, n): fixed block size independent of
// thread count, so per-replica streams and merge order are reproducible.
struct BlockPartition {
    std::uint64_t n_blocks;
    std::uint64_t block_size;

    static BlockPartition for_replicas(std::uint64_t n) {
        const std::uint64_t size = n <= 512 ? n : std::max<std::uint64_t>(1, n / 512);
        if (size == 0) return {0, 1};
        return {(n + size - 1) / size, size};
    }

    std::uint64_t begin(std::uint64_t block) const { return block * block_size; }
    std::uint64_t end(std::uint64_t block, std::uint64_t n) const {
        const std::uint64_t e = (block + 1) * block_size;
        return e < n ? e : n;
    }
};

}  // namespace canyon
