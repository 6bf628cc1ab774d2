#pragma once

#include <functional>

namespace rscorrect {

// Worker count: hardware concurrency, capped by RSCORRECT_THREADS when set.
int worker_count();

// Calls body(begin_i, end_i) over disjoint contiguous chunks of [begin, end).
// Chunks are fixed by the range and worker count, so outputs that are
// independent per index do not depend on scheduling.
void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& body);

}  // namespace rscorrect
