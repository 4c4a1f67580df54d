#pragma once

#include <cstddef>
#include <functional>

namespace concentra {

/// Worker count: the last set_thread_count value, else CONCENTRA_THREADS, else the hardware.
int thread_count();
void set_thread_count(int n);  // n <= 0 restores the default

/// Runs body(i) for i in [0, n). Nested calls run serially on the calling thread.
/// If any call throws, the exception from the lowest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace concentra
