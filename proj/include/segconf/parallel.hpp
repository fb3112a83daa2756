#pragma once

#include <cstddef>
#include <functional>

namespace segconf {

/// Runs fn(0..count-1) on up to `workers` threads. Iterations must write to
/// disjoint outputs. If any iteration throws, the exception from the lowest
/// failing index is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace segconf
