#pragma once

#include <cstddef>
#include <functional>

namespace fftdeblur {

// Upper bound on worker threads used internally. 0 restores the default
// (hardware concurrency).
void set_max_threads(unsigned n) noexcept;
unsigned max_threads() noexcept;

// Runs body(i) for i in [0, count), split into contiguous chunks across at most
// max_threads() threads. body must be safe to call concurrently for distinct i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fftdeblur
