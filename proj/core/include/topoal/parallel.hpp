#pragma once

#include <functional>

namespace topoal {

// Worker count for data-parallel loops and trial execution. Controlled by the
// TOPOAL_WORKERS environment variable; defaults to the hardware concurrency.
int worker_count();

// Chunked parallel loop over [begin, end). Bodies must write to disjoint
// state; results are then independent of the schedule. Nested calls run
// inline on the calling thread so pools never oversubscribe.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

} // namespace topoal
