#pragma once

#include <cstddef>
#include <functional>

namespace race {

/// Resolves a requested worker count; 0 means hardware concurrency.
std::size_t resolve_workers(std::size_t requested);

/// Calls body(i) for i in [0, count) on up to `workers` threads. Each index is
/// visited exactly once; results must be written to index-addressed storage so
/// the outcome is independent of scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace race
