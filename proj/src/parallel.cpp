#include "dcm/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace dcm {

namespace {
std::atomic<int> g_threads{1};
}

int thread_count_hint() { return g_threads.load(); }

void set_thread_count(int threads) { g_threads.store(threads > 1 ? threads : 1); }

void parallel_chunks(std::size_t total,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    const std::size_t nchunks = std::min<std::size_t>(kReductionChunks, total);
    const std::size_t base = total / nchunks, rem = total % nchunks;

    auto chunk_range = [&](std::size_t c) {
        // First `rem` chunks get one extra element; boundaries are a function
        // of (total, nchunks) only.
        std::size_t b = c * base + std::min(c, rem);
        std::size_t e = b + base + (c < rem ? 1 : 0);
        return std::pair<std::size_t, std::size_t>(b, e);
    };

    // Small reductions are not worth spawning for; chunk boundaries are the
    // same either way, so the bits cannot differ.
    int nthreads = std::min<int>(thread_count_hint(), static_cast<int>(nchunks));
    if (total < 32768) nthreads = 1;
    if (nthreads <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c) {
            auto [b, e] = chunk_range(c);
            fn(b, e);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) break;
            auto [b, e] = chunk_range(c);
            fn(b, e);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nthreads - 1);
    for (int t = 0; t < nthreads - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

std::vector<double> chunked_map(std::size_t total,
                                const std::function<double(std::size_t, std::size_t)>& fn) {
    if (total == 0) return {};
    const std::size_t nchunks = std::min<std::size_t>(kReductionChunks, total);
    std::vector<double> out(nchunks, 0.0);
    const std::size_t base = total / nchunks, rem = total % nchunks;
    parallel_chunks(total, [&](std::size_t b, std::size_t e) {
        // Recover the chunk id from its begin offset.
        std::size_t pivot = rem * (base + 1);
        std::size_t c = (b < pivot) ? b / (base + 1) : rem + (b - pivot) / std::max<std::size_t>(base, 1);
        out[c] = fn(b, e);
    });
    return out;
}

double pairwise_sum(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    std::vector<double> cur = xs;
    while (cur.size() > 1) {
        std::vector<double> nxt;
        nxt.reserve((cur.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < cur.size(); i += 2) nxt.push_back(cur[i] + cur[i + 1]);
        if (cur.size() % 2) nxt.push_back(cur.back());
        cur.swap(nxt);
    }
    return cur[0];
}

double reduce_sum(std::size_t total, const std::function<double(std::size_t)>& term) {
    auto partials = chunked_map(total, [&](std::size_t b, std::size_t e) {
        // In-chunk pairwise tree over a local buffer.
        std::vector<double> buf;
        buf.reserve(e - b);
        for (std::size_t i = b; i < e; ++i) buf.push_back(term(i));
        return pairwise_sum(buf);
    });
    return pairwise_sum(partials);
}

} // namespace dcm
