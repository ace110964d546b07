#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dcm {

// Deterministic reduction helpers.  Work is always split into a fixed number
// of chunks whose boundaries do not depend on the thread count; chunk results
// are combined in chunk order, so any thread count yields identical bits.

inline constexpr std::size_t kReductionChunks = 64;

int thread_count_hint();              // last value passed to set_thread_count
void set_thread_count(int threads);   // 0/negative resets to 1

// Evaluates fn(begin, end) over kReductionChunks contiguous ranges of
// [0, total) and returns the per-chunk results in chunk order.
std::vector<double> chunked_map(std::size_t total,
                                const std::function<double(std::size_t, std::size_t)>& fn);

// Pairwise tree sum; deterministic for a fixed input order.
double pairwise_sum(const std::vector<double>& xs);

// Chunked + pairwise reduction of term(i) over i in [0, total).
double reduce_sum(std::size_t total, const std::function<double(std::size_t)>& term);

// Runs fn(begin, end) over fixed chunks, in parallel when a thread hint > 1
// is set.  The chunks may write to disjoint per-index slots only.
void parallel_chunks(std::size_t total,
                     const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace dcm
