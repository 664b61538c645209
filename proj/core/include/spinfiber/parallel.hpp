#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spinfiber::par {

/// Worker count for the helpers below; 1 disables threading.
void set_thread_count(int n);
int thread_count();

inline constexpr std::size_t chunk_size = 4096;

/// Runs chunk(begin, end) over [0, n) in fixed chunks. Chunks may execute on
/// any thread; each must only touch its own index range.
template <class ChunkFn>
void parallel_for(std::size_t n, ChunkFn chunk) {
    if (n == 0) return;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    const int workers = std::min<int>(thread_count(), static_cast<int>(chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            chunk(c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            chunk(c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
}

/// Deterministic map-reduce: partials are produced per fixed chunk and folded
/// in chunk order, so the result is bit-identical for any thread count.
/// chunk(begin, end) must iterate its range in ascending index order.
template <class T, class ChunkFn, class CombineFn>
T map_reduce(std::size_t n, T identity, ChunkFn chunk, CombineFn combine) {
    if (n == 0) return identity;
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<T> partial(chunks, identity);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        partial[begin / chunk_size] = chunk(begin, end);
    });
    T acc = identity;
    for (const T& p : partial) acc = combine(acc, p);
    return acc;
}

} // namespace spinfiber::par
