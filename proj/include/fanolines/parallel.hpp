#pragma once

// Deterministic chunked execution: the index space is split into fixed-size
// chunks numbered in order, workers claim chunks through an atomic counter,
// and callers merge per-chunk results by chunk number.  Output therefore
// cannot depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fanolines {

inline constexpr uint64_t kDefaultChunk = 4096;

// work(chunk_index, begin, end) with [begin, end) a slice of [0, total).
template <class Work>
void run_chunked(uint64_t total, uint64_t chunk_size, unsigned threads, Work&& work) {
    if (total == 0) return;
    if (chunk_size == 0) chunk_size = kDefaultChunk;
    uint64_t nchunks = (total + chunk_size - 1) / chunk_size;
    auto run_one = [&](uint64_t c) {
        uint64_t begin = c * chunk_size;
        uint64_t end = std::min(total, begin + chunk_size);
        work(c, begin, end);
    };
    if (threads <= 1 || nchunks == 1) {
        for (uint64_t c = 0; c < nchunks; ++c) run_one(c);
        return;
    }
    unsigned nworkers = static_cast<unsigned>(std::min<uint64_t>(threads, nchunks));
    std::atomic<uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (unsigned w = 0; w < nworkers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                uint64_t c = next.fetch_add(1);
                if (c >= nchunks) break;
                try {
                    run_one(c);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline uint64_t chunk_count(uint64_t total, uint64_t chunk_size) {
    return total == 0 ? 0 : (total + chunk_size - 1) / chunk_size;
}

}  // namespace fanolines
