#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace bsl {

// Map-reduce over [0, total) split into fixed-size chunks.  The chunk grid
// depends only on (total, chunk_size), never on the worker count, and chunk
// results are combined in index order, so the reduced value is identical for
// any number of threads as long as `combine` is associative over adjacent
// chunks (integer sums, vector concatenation, ...).
template <class R, class Map, class Combine>
R parallel_reduce(std::uint64_t total, std::uint64_t chunk_size, int threads,
                  R init, Map map_chunk, Combine combine) {
    if (total == 0) return init;
    if (chunk_size == 0) chunk_size = 1;
    const std::uint64_t n_chunks = (total + chunk_size - 1) / chunk_size;
    std::vector<R> results(n_chunks, init);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = c * chunk_size;
        const std::uint64_t hi = lo + chunk_size < total ? lo + chunk_size : total;
        results[c] = map_chunk(lo, hi);
    };

    if (threads <= 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr first_error;
        std::vector<std::thread> pool;
        const int n_workers =
            static_cast<int>(std::min<std::uint64_t>(threads, n_chunks));
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::uint64_t c = next.fetch_add(1);
                    if (c >= n_chunks || failed.load()) return;
                    try {
                        run_chunk(c);
                    } catch (...) {
                        if (!failed.exchange(true)) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failed.load()) std::rethrow_exception(first_error);
    }

    R acc = init;
    for (std::uint64_t c = 0; c < n_chunks; ++c) acc = combine(acc, results[c]);
    return acc;
}

} // namespace bsl
