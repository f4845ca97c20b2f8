#pragma once

// Minimal fork-join helper. The worker count comes from NEGDEP_WORKERS when set,
// otherwise from the hardware. Work items are claimed dynamically, so callers
// must make each item depend only on its index (e.g. RandomStream::derive).

#include <cstddef>
#include <functional>

namespace negdep {

int worker_count();

/// Runs body(i) for i in [0, count). The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int workers = worker_count());

}  // namespace negdep
