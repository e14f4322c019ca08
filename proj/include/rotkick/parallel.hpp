#pragma once

#include <functional>

namespace rotkick {

// Worker-count knob for all internal parallel loops.  Defaults to the
// hardware concurrency; set_max_threads(1) forces serial execution.
int max_threads();
void set_max_threads(int n);

// Runs fn(i) for i in [0, n).  Work items are claimed dynamically, so the
// assignment of items to threads varies between runs; callers must write
// results into per-item slots and reduce in index order afterwards.  That
// discipline keeps floating-point results bit-identical for any worker
// count.  The first exception thrown by a work item is rethrown here.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace rotkick
