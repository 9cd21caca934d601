#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace mslab {

// Serial is the reference path; Parallel must produce bit-identical results.
enum class Exec { Serial, Parallel };

// Runs body(i) for i in [0, n). Each index writes only its own output slot, so
// the result never depends on scheduling. If several indices throw, the
// exception from the lowest index is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex guard;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (static_cast<std::size_t>(i) < first_index) {
        first_index = static_cast<std::size_t>(i);
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

inline void set_parallel_width(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

}  // namespace mslab
