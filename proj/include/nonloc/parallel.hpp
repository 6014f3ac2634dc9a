#pragma once

#include <cstddef>
#include <functional>

namespace nonloc {

/// Set the number of worker threads used by parallel_for (process-global).
/// n < 1 is clamped to 1. Results are bit-identical for every thread count:
/// work is only ever split across *independent* output rows, and any
/// cross-row reduction is performed serially in index order by the caller.
void set_threads(int n);

int threads();

/// Run fn(i) for i in [0, n). With threads() == 1 this is a plain loop.
/// Otherwise rows are statically partitioned into contiguous blocks, one per
/// worker. fn must not touch state shared across rows.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace nonloc
